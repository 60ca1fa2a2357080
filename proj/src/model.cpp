#include "nodaltop/model.hpp"

#include <cmath>

namespace nodaltop {

double Harmonic::value(const KPoint& k) const
{
    switch (kind) {
    case HarmonicKind::Cos:
        return amplitude * std::cos(n[0] * k.x() + n[1] * k.y() + n[2] * k.z());
    case HarmonicKind::Sin:
        return amplitude * std::sin(n[0] * k.x() + n[1] * k.y() + n[2] * k.z());
    case HarmonicKind::Poly: {
        double v = amplitude;
        for (int d = 0; d < 3; ++d)
            for (int p = 0; p < n[d]; ++p) v *= k[d];
        return v;
    }
    }
    return 0.0;
}

double Coefficient::value(const KPoint& k) const
{
    double v = 0.0;
    for (const auto& h : harmonics) v += h.value(k);
    return v;
}

CMatrix pauli_word_matrix(const std::string& word)
{
    if (word.empty()) throw ConfigError("empty Pauli word");
    CMatrix result = CMatrix::Identity(1, 1);
    for (char c : word) {
        CMatrix s(2, 2);
        switch (c) {
        case 'I': case '1': s << 1, 0, 0, 1; break;
        case 'X': case 'x': s << 0, 1, 1, 0; break;
        case 'Y': case 'y': s << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': case 'z': s << 1, 0, 0, -1; break;
        default: throw ConfigError(std::string("invalid Pauli letter '") + c + "' in word " + word);
        }
        CMatrix next(result.rows() * 2, result.cols() * 2);
        for (Eigen::Index i = 0; i < result.rows(); ++i)
            for (Eigen::Index j = 0; j < result.cols(); ++j)
                next.block(2 * i, 2 * j, 2, 2) = result(i, j) * s;
        result = std::move(next);
    }
    return result;
}

bool Domain::contains(const KPoint& k, double slack) const
{
    if (is_torus()) return k.allFinite();
    return k.allFinite() && k.cwiseAbs().maxCoeff() <= extent + slack;
}

Vec3 TwoBandField::normalized(const KPoint& k) const
{
    Vec3 h = h_(k);
    double n = h.norm();
    if (n == 0.0) throw InvariantError("two-band field vanishes; normalization undefined");
    return h / n;
}

namespace {

int count_y(const std::string& word)
{
    int n = 0;
    for (char c : word)
        if (c == 'Y' || c == 'y') ++n;
    return n;
}

}  // namespace

BlochModel::BlochModel(std::string name, int occupied_count, bool reality, Domain domain,
                       std::vector<PauliTerm> terms)
    : name_(std::move(name)), occupied_count_(occupied_count), reality_(reality), domain_(domain),
      terms_(std::move(terms))
{
    if (terms_.empty()) throw ConfigError("model " + name_ + " has no terms");
    const std::size_t letters = terms_.front().word.size();
    for (const auto& t : terms_) {
        if (t.word.size() != letters)
            throw ConfigError("Pauli words of model " + name_ + " have inconsistent lengths");
        if (reality_ && count_y(t.word) % 2 != 0)
            throw ConfigError("model " + name_ + " is flagged real but word " + t.word +
                              " is imaginary");
        if (domain_.is_torus())
            for (const auto& h : t.coefficient.harmonics)
                if (!h.periodic())
                    throw ConfigError("polynomial coefficient in torus model " + name_);
        term_matrices_.push_back(pauli_word_matrix(t.word));
    }
    if (letters > 6) throw ConfigError("at most 6 tensor factors supported");
    band_count_ = 1 << letters;
    if (occupied_count_ <= 0 || occupied_count_ >= band_count_)
        throw ConfigError("occupied_count must be in [1, band_count)");
    if (!domain_.is_torus() && !(domain_.extent > 0.0))
        throw ConfigError("box extent must be positive");
}

KPoint BlochModel::canonical(const KPoint& k) const
{
    if (domain_.is_torus()) return reduce_to_zone(k);
    if (!domain_.contains(k))
        throw DomainError("k-point outside the continuum box of model " + name_);
    return k;
}

CMatrix BlochModel::hamiltonian(const KPoint& k) const
{
    const KPoint q = canonical(k);
    CMatrix h = CMatrix::Zero(band_count_, band_count_);
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        const double c = terms_[t].coefficient.value(q);
        if (c != 0.0) h += c * term_matrices_[t];
    }
    return h;
}

RMatrix BlochModel::real_hamiltonian(const KPoint& k) const
{
    if (!reality_) throw UnsupportedError("model " + name_ + " is not real");
    return hamiltonian(k).real();
}

Eigen::VectorXd BlochModel::spectrum(const KPoint& k) const
{
    if (reality_) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(real_hamiltonian(k), Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hamiltonian(k), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

Eigensystem BlochModel::eigensystem(const KPoint& k) const
{
    if (reality_) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(real_hamiltonian(k));
        return {es.eigenvalues(), es.eigenvectors().cast<cplx>()};
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hamiltonian(k));
    return {es.eigenvalues(), es.eigenvectors()};
}

double BlochModel::gap(const KPoint& k, int gap_index) const
{
    if (gap_index <= 0 || gap_index >= band_count_)
        throw ConfigError("gap index out of range");
    const Eigen::VectorXd e = spectrum(k);
    return e[gap_index] - e[gap_index - 1];
}

std::optional<TwoBandField> BlochModel::two_band_field() const
{
    if (band_count_ != 2) return std::nullopt;
    std::array<std::vector<const Coefficient*>, 3> parts;
    for (const auto& t : terms_) {
        switch (t.word[0]) {
        case 'X': case 'x': parts[0].push_back(&t.coefficient); break;
        case 'Y': case 'y': parts[1].push_back(&t.coefficient); break;
        case 'Z': case 'z': parts[2].push_back(&t.coefficient); break;
        default: break;
        }
    }
    const bool torus = domain_.is_torus();
    const Domain dom = domain_;
    return TwoBandField([parts, torus, dom](const KPoint& k) {
        const KPoint q = torus ? reduce_to_zone(k) : k;
        if (!dom.contains(q)) throw DomainError("k-point outside the continuum box");
        Vec3 h = Vec3::Zero();
        for (int d = 0; d < 3; ++d)
            for (const auto* c : parts[d]) h[d] += c->value(q);
        return h;
    });
}

namespace {

Harmonic cos_h(int nx, int ny, int nz, double a) { return {HarmonicKind::Cos, {nx, ny, nz}, a}; }
Harmonic sin_h(int nx, int ny, int nz, double a) { return {HarmonicKind::Sin, {nx, ny, nz}, a}; }
Harmonic poly_h(int nx, int ny, int nz, double a) { return {HarmonicKind::Poly, {nx, ny, nz}, a}; }

double param(const std::map<std::string, double>& params, const std::string& key, double fallback)
{
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known, const std::string& model)
{
    for (const auto& [key, value] : params) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError("unknown parameter '" + key + "' for builtin " + model);
    }
}

}  // namespace

std::vector<std::string> builtin_names()
{
    return {"weyl-lattice", "nodal-loop-real", "four-band-linked", "four-band-linked-lattice"};
}

BlochModel builtin(const std::string& name, const std::map<std::string, double>& params)
{
    if (name == "weyl-lattice") {
        reject_unknown(params, {"m"}, name);
        const double m = param(params, "m", 2.0);
        if (!(m > 1.0 && m < 3.0)) throw ConfigError("weyl-lattice requires 1 < m < 3");
        BlochModel model(name, 1, false, Domain::torus(),
                         {{"X", {{sin_h(1, 0, 0, 1.0)}}},
                          {"Y", {{sin_h(0, 1, 0, 1.0)}}},
                          {"Z", {{cos_h(1, 0, 0, 1.0), cos_h(0, 1, 0, 1.0), cos_h(0, 0, 1, 1.0),
                                  cos_h(0, 0, 0, -m)}}}});
        model.set_parameters({{"m", m}});
        return model;
    }
    if (name == "nodal-loop-real") {
        reject_unknown(params, {"m"}, name);
        const double m = param(params, "m", 2.0);
        if (!(m > 1.0 && m < 3.0)) throw ConfigError("nodal-loop-real requires 1 < m < 3");
        BlochModel model(name, 1, true, Domain::torus(),
                         {{"X", {{cos_h(1, 0, 0, 1.0), cos_h(0, 1, 0, 1.0), cos_h(0, 0, 1, 1.0),
                                  cos_h(0, 0, 0, -m)}}},
                          {"Z", {{sin_h(0, 0, 1, 1.0)}}}});
        model.set_parameters({{"m", m}});
        return model;
    }
    if (name == "four-band-linked") {
        reject_unknown(params, {"m", "extent"}, name);
        const double m = param(params, "m", 1.0);
        const double extent = param(params, "extent", 3.0);
        if (!(std::abs(m) > 0.0 && std::abs(m) < 2.5))
            throw ConfigError("four-band-linked requires 0 < |m| < 2.5");
        if (!(extent > std::abs(m) + 0.5))
            throw ConfigError("four-band-linked box extent must exceed |m| + 0.5");
        BlochModel model(name, 2, true, Domain::box(extent),
                         {{"IX", {{poly_h(1, 0, 0, 1.0)}}},
                          {"YY", {{poly_h(0, 1, 0, 1.0)}}},
                          {"IZ", {{poly_h(0, 0, 1, 1.0)}}},
                          {"ZZ", Coefficient::constant(m)}});
        model.set_parameters({{"m", m}, {"extent", extent}});
        return model;
    }
    if (name == "four-band-linked-lattice") {
        reject_unknown(params, {"m"}, name);
        const double m = param(params, "m", 1.0);
        if (!(std::abs(m) > 0.0 && std::abs(m) < 2.0))
            throw ConfigError("four-band-linked-lattice requires 0 < |m| < 2");
        // ky, kz -> 2 sin k keeps the Fermi loops 4(sin^2 ky + sin^2 kz) = m^2
        // away from the saddle level 4 of the (ky, kz) map.
        BlochModel model(name, 2, true, Domain::torus(),
                         {{"IX", {{sin_h(1, 0, 0, 1.0)}}},
                          {"YY", {{sin_h(0, 1, 0, 2.0)}}},
                          {"IZ", {{sin_h(0, 0, 1, 2.0)}}},
                          {"ZZ", Coefficient::constant(m)}});
        model.set_parameters({{"m", m}});
        return model;
    }
    throw ConfigError("unknown builtin model '" + name + "'");
}

}  // namespace nodaltop
