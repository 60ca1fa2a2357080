#pragma once

#include "nodaltop/types.hpp"

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nodaltop {

enum class HarmonicKind { Cos, Sin, Poly };

/// One coefficient summand: a*cos(n.k), a*sin(n.k), or a*kx^n0*ky^n1*kz^n2.
struct Harmonic {
    HarmonicKind kind = HarmonicKind::Cos;
    std::array<int, 3> n{0, 0, 0};
    double amplitude = 0.0;

    double value(const KPoint& k) const;
    bool periodic() const { return kind != HarmonicKind::Poly; }
};

struct Coefficient {
    std::vector<Harmonic> harmonics;

    double value(const KPoint& k) const;

    static Coefficient constant(double a) { return {{{HarmonicKind::Cos, {0, 0, 0}, a}}}; }
};

/// coefficient(k) times a tensor word over {I, X, Y, Z}; the leftmost letter
/// acts on the outermost tensor factor.
struct PauliTerm {
    std::string word;
    Coefficient coefficient;
};

/// Dense matrix of a Pauli word. Throws ConfigError on letters outside IXYZ.
CMatrix pauli_word_matrix(const std::string& word);

struct Domain {
    enum class Kind { Torus, Box };
    Kind kind = Kind::Torus;
    double extent = 3.0;  // box is [-extent, extent]^3

    static Domain torus() { return {Kind::Torus, kPi}; }
    static Domain box(double extent) { return {Kind::Box, extent}; }

    bool is_torus() const { return kind == Kind::Torus; }
    bool contains(const KPoint& k, double slack = 1e-12) const;
};

/// Eigenvalues in ascending order with matching eigenvector columns.
/// For reality-flagged models the vectors are real (imaginary parts exactly 0).
struct Eigensystem {
    Eigen::VectorXd energies;
    CMatrix vectors;
};

/// Two-band field h with H = h.sigma (+ identity shift).
class TwoBandField {
public:
    explicit TwoBandField(std::function<Vec3(const KPoint&)> h) : h_(std::move(h)) {}

    Vec3 operator()(const KPoint& k) const { return h_(k); }
    Vec3 normalized(const KPoint& k) const;

private:
    std::function<Vec3(const KPoint&)> h_;
};

/// Bloch Hamiltonian k -> H(k) given as a sum of Pauli-string terms.
/// Immutable after construction; all evaluators are safe to call concurrently.
class BlochModel {
public:
    BlochModel(std::string name, int occupied_count, bool reality, Domain domain,
               std::vector<PauliTerm> terms);

    const std::string& name() const { return name_; }
    int band_count() const { return band_count_; }
    int occupied_count() const { return occupied_count_; }
    bool reality() const { return reality_; }
    const Domain& domain() const { return domain_; }
    bool is_lattice() const { return domain_.is_torus(); }
    const std::vector<PauliTerm>& terms() const { return terms_; }

    /// Parameters the model was built from (builtin provenance, reporting only).
    const std::map<std::string, double>& parameters() const { return parameters_; }
    void set_parameters(std::map<std::string, double> p) { parameters_ = std::move(p); }

    /// Point actually fed to the coefficients: reduced for torus models,
    /// range-checked for box models.
    KPoint canonical(const KPoint& k) const;

    CMatrix hamiltonian(const KPoint& k) const;
    RMatrix real_hamiltonian(const KPoint& k) const;
    Eigen::VectorXd spectrum(const KPoint& k) const;
    Eigensystem eigensystem(const KPoint& k) const;

    /// E[gap_index] - E[gap_index - 1] (0-based ascending bands), i.e. the gap
    /// above the lowest gap_index bands.
    double gap(const KPoint& k, int gap_index) const;
    double direct_gap(const KPoint& k) const { return gap(k, occupied_count_); }

    /// h for two-band models; nullopt when band_count != 2.
    std::optional<TwoBandField> two_band_field() const;

private:
    std::string name_;
    int band_count_ = 0;
    int occupied_count_ = 0;
    bool reality_ = false;
    Domain domain_;
    std::vector<PauliTerm> terms_;
    std::vector<CMatrix> term_matrices_;
    std::map<std::string, double> parameters_;
};

/// Builtin models:
///   weyl-lattice(m), 1 < m < 3
///   nodal-loop-real(m), 1 < m < 3
///   four-band-linked(m), 0 < |m| < 2.5, continuum box (param "extent", default 3)
///   four-band-linked-lattice(m), 0 < |m| < 2
BlochModel builtin(const std::string& name, const std::map<std::string, double>& params = {});

std::vector<std::string> builtin_names();

}  // namespace nodaltop
