#include "qutritlab/control.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace qutritlab {

void Rotation::validate() const {
    if (subspace != 0 && subspace != 1) {
        throw std::invalid_argument("Rotation: subspace must be (0,1) or (1,2)");
    }
    if (angle_rad <= -2.0 * M_PI || angle_rad > 2.0 * M_PI) {
        throw std::invalid_argument("Rotation: angle outside (-2pi, 2pi]");
    }
}

UnitaryMatrix compile_rotation(const Rotation& r) {
    r.validate();
    double phi = r.angle_rad;
    if (r.axis == RotationAxis::minus_x || r.axis == RotationAxis::minus_y) {
        phi = -phi;
    }
    const double c = std::cos(0.5 * phi);
    const double s = std::sin(0.5 * phi);
    Matrix u = Matrix::Identity(3, 3);
    const int i = r.subspace;
    if (r.axis == RotationAxis::x || r.axis == RotationAxis::minus_x) {
        u(i, i) = c;
        u(i, i + 1) = -s;
        u(i + 1, i) = s;
        u(i + 1, i + 1) = c;
    } else {
        u(i, i) = c;
        u(i, i + 1) = Complex(0.0, -s);
        u(i + 1, i) = Complex(0.0, -s);
        u(i + 1, i + 1) = c;
    }
    return UnitaryMatrix(u);
}

UnitaryMatrix compile_sequence(const PulseSequence& s) {
    Matrix u = Matrix::Identity(3, 3);
    for (const Rotation& r : s.rotations) {
        u = compile_rotation(r).matrix() * u;
    }
    return UnitaryMatrix(u);
}

namespace {

double parse_angle(const std::string& text) {
    // Accepts "pi", "-pi/2", "3pi/4", "2pi", plain decimals, "0".
    std::string t;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    }
    if (t.empty()) throw std::invalid_argument("parse_sequence: empty angle");
    double sign = 1.0;
    size_t pos = 0;
    if (t[pos] == '+' || t[pos] == '-') {
        sign = (t[pos] == '-') ? -1.0 : 1.0;
        ++pos;
    }
    size_t pi_pos = t.find("pi", pos);
    if (pi_pos == std::string::npos) {
        size_t used = 0;
        double v = std::stod(t.substr(pos), &used);
        if (used != t.size() - pos) {
            throw std::invalid_argument("parse_sequence: bad angle '" + text + "'");
        }
        return sign * v;
    }
    double coeff = 1.0;
    if (pi_pos > pos) {
        size_t used = 0;
        coeff = std::stod(t.substr(pos, pi_pos - pos), &used);
        if (used != pi_pos - pos) {
            throw std::invalid_argument("parse_sequence: bad angle '" + text + "'");
        }
    }
    double denom = 1.0;
    size_t rest = pi_pos + 2;
    if (rest < t.size()) {
        if (t[rest] != '/') {
            throw std::invalid_argument("parse_sequence: bad angle '" + text + "'");
        }
        size_t used = 0;
        denom = std::stod(t.substr(rest + 1), &used);
        if (used != t.size() - rest - 1 || denom == 0.0) {
            throw std::invalid_argument("parse_sequence: bad angle '" + text + "'");
        }
    }
    return sign * coeff * M_PI / denom;
}

Rotation parse_pulse(const std::string& token) {
    // R01x(pi), R12-y(pi/2), ...
    std::string t;
    for (char c : token) {
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    }
    if (t.size() < 6 || (t[0] != 'R' && t[0] != 'r')) {
        throw std::invalid_argument("parse_sequence: bad pulse '" + token + "'");
    }
    Rotation r{};
    if (t.compare(1, 2, "01") == 0) {
        r.subspace = 0;
    } else if (t.compare(1, 2, "12") == 0) {
        r.subspace = 1;
    } else {
        throw std::invalid_argument("parse_sequence: bad subspace in '" + token + "'");
    }
    size_t pos = 3;
    bool neg = false;
    if (t[pos] == '-') {
        neg = true;
        ++pos;
    }
    if (t[pos] == 'x') {
        r.axis = neg ? RotationAxis::minus_x : RotationAxis::x;
    } else if (t[pos] == 'y') {
        r.axis = neg ? RotationAxis::minus_y : RotationAxis::y;
    } else {
        throw std::invalid_argument("parse_sequence: bad axis in '" + token + "'");
    }
    ++pos;
    if (pos >= t.size() || t[pos] != '(' || t.back() != ')') {
        throw std::invalid_argument("parse_sequence: missing angle in '" + token + "'");
    }
    r.angle_rad = parse_angle(t.substr(pos + 1, t.size() - pos - 2));
    r.validate();
    return r;
}

}  // namespace

PulseSequence parse_sequence(const std::string& text) {
    PulseSequence seq;
    std::string trimmed;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
    }
    if (trimmed.empty() || trimmed == "I") return seq;

    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (c == '.') {
            tokens.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    tokens.push_back(current);
    // Rightmost token is applied first in time.
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        seq.rotations.push_back(parse_pulse(*it));
    }
    return seq;
}

std::string format_sequence(const PulseSequence& s) {
    if (s.rotations.empty()) return "I";
    auto fmt_angle = [](double a) {
        std::ostringstream os;
        double q = a / M_PI;
        double rq = std::round(q * 12.0) / 12.0;
        if (std::abs(q - rq) < 1e-12 && rq != 0.0) {
            if (rq == 1.0) return std::string("pi");
            if (rq == -1.0) return std::string("-pi");
            for (int den = 2; den <= 12; ++den) {
                double num = rq * den;
                if (std::abs(num - std::round(num)) < 1e-9) {
                    long n = std::lround(num);
                    if (n == 1) return "pi/" + std::to_string(den);
                    if (n == -1) return "-pi/" + std::to_string(den);
                    return std::to_string(n) + "pi/" + std::to_string(den);
                }
            }
        }
        os << a;
        return os.str();
    };
    std::string out;
    for (auto it = s.rotations.rbegin(); it != s.rotations.rend(); ++it) {
        if (!out.empty()) out += " . ";
        out += "R";
        out += (it->subspace == 0) ? "01" : "12";
        switch (it->axis) {
            case RotationAxis::x: out += "x"; break;
            case RotationAxis::y: out += "y"; break;
            case RotationAxis::minus_x: out += "-x"; break;
            case RotationAxis::minus_y: out += "-y"; break;
        }
        out += "(" + fmt_angle(it->angle_rad) + ")";
    }
    return out;
}

TomographySet table1_tomography_set() {
    const double pi = M_PI;
    const double half = 0.5 * M_PI;
    auto rx = [](int sub, double a) {
        return Rotation{sub, RotationAxis::x, a};
    };
    auto ry = [](int sub, double a) {
        return Rotation{sub, RotationAxis::y, a};
    };
    TomographySet set;
    set.sequences.resize(9);
    set.sequences[0] = PulseSequence{};
    set.sequences[1] = PulseSequence{{rx(0, half)}};
    set.sequences[2] = PulseSequence{{ry(0, half)}};
    set.sequences[3] = PulseSequence{{rx(0, pi)}};
    set.sequences[4] = PulseSequence{{rx(0, pi), rx(1, half)}};
    set.sequences[5] = PulseSequence{{rx(0, pi), ry(1, half)}};
    set.sequences[6] = PulseSequence{{rx(0, pi), rx(1, half), rx(0, pi)}};
    set.sequences[7] = PulseSequence{{rx(0, pi), ry(1, half), rx(0, pi)}};
    set.sequences[8] = PulseSequence{{rx(0, pi), rx(1, pi), rx(0, pi)}};
    return set;
}

std::vector<Vector> table1_preparation_kets() {
    TomographySet set = table1_tomography_set();
    std::vector<Vector> kets;
    kets.reserve(set.sequences.size());
    Vector ground = basis_ket(3, 0);
    for (const PulseSequence& s : set.sequences) {
        kets.push_back(compile_sequence(s).matrix() * ground);
    }
    return kets;
}

std::vector<DensityMatrix> table1_preparation_states() {
    std::vector<DensityMatrix> states;
    for (const Vector& ket : table1_preparation_kets()) {
        states.push_back(DensityMatrix::pure(ket));
    }
    return states;
}

ProjectionSandwich projection_procedure(const Vector& v) {
    const int d = static_cast<int>(v.size());
    if (std::abs(v.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("projection_procedure: state must be normalized");
    }
    Matrix u(d, d);
    u.col(0) = v;
    int filled = 1;
    for (int j = 0; j < d && filled < d; ++j) {
        Vector cand = basis_ket(d, j);
        for (int k = 0; k < filled; ++k) {
            cand -= (u.col(k).adjoint() * cand)(0, 0) * u.col(k);
        }
        double n = cand.norm();
        if (n > 1e-7) {
            u.col(filled++) = cand / n;
        }
    }
    if (filled != d) {
        throw std::runtime_error("projection_procedure: basis completion failed");
    }
    UnitaryMatrix post(u);
    return ProjectionSandwich{post.adjoint(), post};
}

KrausChannel conjugate_channel(const ProjectionSandwich& sandwich,
                               const KrausChannel& device) {
    std::vector<Matrix> ops;
    ops.reserve(device.kraus_ops().size());
    for (const Matrix& k : device.kraus_ops()) {
        ops.push_back(sandwich.post.matrix() * k * sandwich.pre.matrix());
    }
    std::optional<std::vector<double>> labels;
    if (device.has_labels()) labels = device.labels();
    return KrausChannel(std::move(ops), std::move(labels));
}

}  // namespace qutritlab
