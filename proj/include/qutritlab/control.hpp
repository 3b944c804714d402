#pragma once

#include <string>

#include "qutritlab/channel.hpp"
#include "qutritlab/states.hpp"

namespace qutritlab {

enum class RotationAxis { x, y, minus_x, minus_y };

// Rotation of `angle` about the axis in the (i, i+1) qutrit subspace.
// Axis convention, fixed so the standard tomography table reads literally:
//   R_x(phi)|i> = cos(phi/2)|i> + sin(phi/2)|i+1>
//   R_y(phi)|i> = cos(phi/2)|i> - i sin(phi/2)|i+1>
// Note this swaps the usual textbook x/y generator labels.
struct Rotation {
    int subspace;        // 0 -> (0,1), 1 -> (1,2)
    RotationAxis axis;
    double angle_rad;    // in (-2*pi, 2*pi]

    void validate() const;
};

// Ordered pulse list, stored first-applied-first. The text form uses the
// rightmost-first convention: "R12x(pi/2) . R01x(pi)" applies R01x(pi) first.
struct PulseSequence {
    std::vector<Rotation> rotations;
};

UnitaryMatrix compile_rotation(const Rotation& r);
UnitaryMatrix compile_sequence(const PulseSequence& s);

PulseSequence parse_sequence(const std::string& text);
std::string format_sequence(const PulseSequence& s);

struct TomographySet {
    std::vector<PulseSequence> sequences;  // labeled 1..N in order
};

// The nine-pulse tomography set for a readout blind to |1> vs |2>.
TomographySet table1_tomography_set();

// The matching preparation states, computed by compiling each sequence onto
// |0>; never transcribed, so downstream fits use the operational states.
std::vector<DensityMatrix> table1_preparation_states();
std::vector<Vector> table1_preparation_kets();

struct ProjectionSandwich {
    UnitaryMatrix pre;   // applied before the device measurement (U^dag)
    UnitaryMatrix post;  // applied after (U), restoring the frame
};

// Unitary sandwich turning a ground-state measurement into a measurement of
// |v><v|: post * ... * pre with post|0> = v.
ProjectionSandwich projection_procedure(const Vector& v);

// Conjugate a device channel by the sandwich: K_i -> post K_i pre.
KrausChannel conjugate_channel(const ProjectionSandwich& sandwich,
                               const KrausChannel& device);

}  // namespace qutritlab
