#include "cplab/exact.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cplab::exact {

namespace {

int int_pow(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

GeometryPtr window_geometry(int d, int N, Flavor flavor) {
    return make_geometry(d, N, flavor == Flavor::InfectedBoundary ? Boundary::InfectedExterior
                                                                  : Boundary::Free);
}

void check_dense_cap(std::size_t states, const char* what) {
    if (states > kDenseStateCap)
        throw std::invalid_argument(std::string(what) + ": state count " + std::to_string(states) +
                                    " exceeds dense cap " + std::to_string(kDenseStateCap));
}

}  // namespace

StateSpace::StateSpace(int d, int N) : d(d), N(N), sites(int_pow(2 * N + 1, d)) {
    if (sites > 30) throw std::invalid_argument("window too large to enumerate");
    size = std::size_t{1} << sites;
}

std::uint32_t StateSpace::mask_of(const Configuration& c) const {
    if (c.geometry().site_count() != sites) throw std::invalid_argument("geometry mismatch");
    std::uint32_t mask = 0;
    for (int s = 0; s < sites; ++s) mask |= static_cast<std::uint32_t>(c.test(s)) << s;
    return mask;
}

Configuration StateSpace::config_of(std::uint32_t mask, const GeometryPtr& geometry) const {
    if (geometry->site_count() != sites) throw std::invalid_argument("geometry mismatch");
    Configuration c(geometry);
    for (int s = 0; s < sites; ++s)
        if ((mask >> s) & 1u) c.set(s);
    return c;
}

RateMatrix::RateMatrix(Eigen::MatrixXd m, Flavor flavor, int d, int N, double lambda,
                       int guard_state)
    : m_(std::move(m)),
      flavor_(flavor),
      d_(d),
      n_(N),
      sites_(int_pow(2 * N + 1, d)),
      lambda_(lambda),
      guard_state_(guard_state) {}

RateMatrix build_generator(int d, int N, double lambda, Flavor flavor) {
    if (lambda < 0) throw std::invalid_argument("lambda must be non-negative");
    const StateSpace space(d, N);
    check_dense_cap(space.size, "build_generator");
    const auto geom = window_geometry(d, N, flavor);
    const int sites = space.sites;
    const auto n = static_cast<Eigen::Index>(space.size);

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (std::uint32_t s = 0; s < space.size; ++s) {
        double total = 0.0;
        for (int x = 0; x < sites; ++x) {
            const std::uint32_t flipped = s ^ (1u << x);
            double rate = 0.0;
            if ((s >> x) & 1u) {
                if (flavor != Flavor::NoRecovery) rate = 1.0;
            } else {
                int k = 0;
                for (int dir = 0; dir < geom->directions(); ++dir) {
                    const Site nb = geom->neighbor(static_cast<Site>(x), dir);
                    if (nb >= 0) k += (s >> nb) & 1u;
                }
                if (flavor == Flavor::InfectedBoundary) k += geom->exterior_degree(static_cast<Site>(x));
                rate = lambda * k;
            }
            if (rate > 0.0) {
                q(s, flipped) += rate;
                total += rate;
            }
        }
        q(s, s) = -total;
    }
    return RateMatrix(std::move(q), flavor, d, N, lambda);
}

RateMatrix build_guarded_generator(int d, int N, double lambda) {
    if (lambda < 0) throw std::invalid_argument("lambda must be non-negative");
    const StateSpace space(d, N);
    check_dense_cap(space.size + 1, "build_guarded_generator");
    const auto geom = window_geometry(d, N, Flavor::Absorbing);
    const int sites = space.sites;
    const auto n = static_cast<Eigen::Index>(space.size) + 1;
    const Eigen::Index guard = n - 1;

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (std::uint32_t s = 0; s < space.size; ++s) {
        double total = 0.0;
        for (int x = 0; x < sites; ++x) {
            const std::uint32_t flipped = s ^ (1u << x);
            double rate = 0.0;
            if ((s >> x) & 1u) {
                rate = 1.0;
                // outbound infections across the window edge jump to the guard
                const double exit_rate = lambda * geom->exterior_degree(static_cast<Site>(x));
                if (exit_rate > 0.0) {
                    q(s, guard) += exit_rate;
                    total += exit_rate;
                }
            } else {
                int k = 0;
                for (int dir = 0; dir < geom->directions(); ++dir) {
                    const Site nb = geom->neighbor(static_cast<Site>(x), dir);
                    if (nb >= 0) k += (s >> nb) & 1u;
                }
                rate = lambda * k;
            }
            if (rate > 0.0) {
                q(s, flipped) += rate;
                total += rate;
            }
        }
        q(s, s) -= total;
    }
    return RateMatrix(std::move(q), Flavor::Absorbing, d, N, lambda, static_cast<int>(guard));
}

RateMatrix build_coupled_generator(int d, int N, double lambda, Flavor flavor) {
    if (lambda < 0) throw std::invalid_argument("lambda must be non-negative");
    const StateSpace space(d, N);
    const std::size_t pair_states = space.size * space.size;
    if (pair_states > 4096)
        throw std::invalid_argument("build_coupled_generator: pair state count " +
                                    std::to_string(pair_states) + " exceeds cap 4096");
    const auto geom = window_geometry(d, N, flavor);
    const int sites = space.sites;
    const auto n = static_cast<Eigen::Index>(pair_states);

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    auto add = [&](std::uint32_t from, std::uint32_t to, double rate) {
        if (from != to && rate > 0.0) {
            q(from, to) += rate;
            q(from, from) -= rate;
        }
    };

    for (std::uint32_t a = 0; a < space.size; ++a) {
        for (std::uint32_t b = 0; b < space.size; ++b) {
            const std::uint32_t from = a | (b << sites);
            for (int x = 0; x < sites; ++x) {
                const std::uint32_t bit = 1u << x;
                // shared recovery mark at x
                if (flavor != Flavor::NoRecovery)
                    add(from, (a & ~bit) | ((b & ~bit) << sites), 1.0);
                // shared infection arrows into x
                for (int dir = 0; dir < geom->directions(); ++dir) {
                    const Site src = geom->neighbor(static_cast<Site>(x), dir);
                    if (src < 0) continue;
                    const std::uint32_t sbit = 1u << src;
                    const std::uint32_t a2 = (a & sbit) ? (a | bit) : a;
                    const std::uint32_t b2 = (b & sbit) ? (b | bit) : b;
                    add(from, a2 | (b2 << sites), lambda);
                }
                // arrows from the permanently infected exterior hit both copies
                if (flavor == Flavor::InfectedBoundary) {
                    const int e = geom->exterior_degree(static_cast<Site>(x));
                    if (e > 0) add(from, (a | bit) | ((b | bit) << sites), lambda * e);
                }
            }
        }
    }
    return RateMatrix(std::move(q), flavor, d, N, lambda);
}

Eigen::VectorXd stationary(const RateMatrix& q) {
    if (q.flavor() != Flavor::InfectedBoundary)
        throw std::invalid_argument("stationary: generator must be irreducible (InfectedBoundary)");
    const auto n = q.size();
    Eigen::MatrixXd a = q.matrix().transpose();
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd mu = a.partialPivLu().solve(rhs);

    const double resid = (q.matrix().transpose() * mu).lpNorm<Eigen::Infinity>();
    if (!(resid <= 1e-10))
        throw std::runtime_error("stationary solve did not converge, residual " +
                                 std::to_string(resid));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (mu(i) < -1e-12) throw std::runtime_error("stationary vector has negative entries");
        if (mu(i) < 0) mu(i) = 0;
    }
    mu /= mu.sum();
    return mu;
}

Eigen::VectorXd stationary_power_iteration(const RateMatrix& q, int max_iters, double tol) {
    const auto n = q.size();
    const double uni = q.matrix().diagonal().cwiseAbs().maxCoeff();
    if (uni == 0.0) return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    // row-stochastic P = I + Q/uni, iterated on the left
    Eigen::MatrixXd pt = (q.matrix() / uni).transpose();
    pt.diagonal().array() += 1.0;
    Eigen::VectorXd mu = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < max_iters; ++it) {
        Eigen::VectorXd next = pt * mu;
        next /= next.sum();
        const double diff = (next - mu).lpNorm<Eigen::Infinity>();
        mu = next;
        if (diff < tol) break;
    }
    return mu;
}

namespace {

/// One uniformization sweep with Lambda*t small enough for stable Poisson
/// weights. Error control: stop once the accumulated Poisson mass leaves a
/// tail below `tail_budget`.
template <typename Vec>
Vec uniformize_step(const Eigen::MatrixXd& qm, const Vec& f, double t, double tail_budget) {
    const double uni = qm.diagonal().cwiseAbs().maxCoeff();
    if (uni * t == 0.0) return f;
    const double a = uni * t;
    double w = std::exp(-a);
    double cum = w;
    Vec term = f;
    Vec out = w * term;
    const double cap = a + 60.0 * std::sqrt(a + 1.0) + 200.0;
    int k = 0;
    while (cum < 1.0 - tail_budget) {
        ++k;
        if (static_cast<double>(k) > cap)
            throw std::runtime_error("uniformization truncation budget exceeded, tail bound " +
                                     std::to_string(1.0 - cum));
        term = term + (qm * term) / uni;  // P * term with P = I + Q/uni
        w *= a / static_cast<double>(k);
        cum += w;
        out += w * term;
    }
    return out;
}

template <typename Vec>
Vec uniformize(const Eigen::MatrixXd& qm, Vec f, double t) {
    if (t < 0) throw std::invalid_argument("negative time");
    if (t == 0) return f;
    const double uni = qm.diagonal().cwiseAbs().maxCoeff();
    // split long horizons so exp(-Lambda t) stays representable
    const int steps = std::max(1, static_cast<int>(std::ceil(uni * t / 600.0)));
    const double budget = 1e-13 / static_cast<double>(steps);
    for (int i = 0; i < steps; ++i) f = uniformize_step(qm, f, t / steps, budget);
    return f;
}

}  // namespace

Eigen::VectorXcd semigroup_apply(const RateMatrix& q, const Eigen::VectorXcd& f, double t) {
    if (f.size() != q.size()) throw std::invalid_argument("dimension mismatch");
    return uniformize<Eigen::VectorXcd>(q.matrix(), f, t);
}

Eigen::VectorXd semigroup_apply(const RateMatrix& q, const Eigen::VectorXd& f, double t) {
    if (f.size() != q.size()) throw std::invalid_argument("dimension mismatch");
    return uniformize<Eigen::VectorXd>(q.matrix(), f, t);
}

Eigen::VectorXd distribution_at(const RateMatrix& q, const Eigen::VectorXd& rho0, double t) {
    if (rho0.size() != q.size()) throw std::invalid_argument("dimension mismatch");
    const Eigen::MatrixXd qt = q.matrix().transpose();
    return uniformize<Eigen::VectorXd>(qt, rho0, t);
}

Spectrum spectrum(const RateMatrix& q) {
    check_dense_cap(static_cast<std::size_t>(q.size()), "spectrum");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(q.matrix(), /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
    Spectrum sp;
    sp.eigenvalues.assign(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + solver.eigenvalues().size());
    return sp;
}

EigenSystem eigen_system(const RateMatrix& q) {
    check_dense_cap(static_cast<std::size_t>(q.size()), "eigen_system");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(q.matrix(), /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
    return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

int zero_multiplicity(const Spectrum& sp, double tol) {
    int k = 0;
    for (const auto& z : sp.eigenvalues)
        if (std::abs(z) <= tol) ++k;
    return k;
}

double spectral_gap(const Spectrum& sp, double tol) {
    double gap = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const auto& z : sp.eigenvalues) {
        if (std::abs(z) <= tol) continue;
        gap = std::min(gap, -z.real());
        found = true;
    }
    if (!found) throw std::runtime_error("spectral_gap: no nonzero eigenvalues");
    return gap;
}

double variance(const Eigen::VectorXd& mu, const Eigen::VectorXcd& f) {
    if (mu.size() != f.size()) throw std::invalid_argument("dimension mismatch");
    std::complex<double> mean = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) mean += mu(i) * f(i);
    double var = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i) var += mu(i) * std::norm(f(i) - mean);
    return var;
}

double variance(const Eigen::VectorXd& mu, const Eigen::VectorXd& f) {
    return variance(mu, Eigen::VectorXcd(f.cast<std::complex<double>>()));
}

double exact_extinction(const RateMatrix& q_absorbing, std::uint32_t initial_mask, double t) {
    if (q_absorbing.flavor() != Flavor::Absorbing)
        throw std::invalid_argument("exact_extinction requires the Absorbing flavor");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(q_absorbing.size());
    g(0) = 1.0;  // the empty configuration
    return hit_probability(q_absorbing, static_cast<Eigen::Index>(initial_mask), g, t);
}

double hit_probability(const RateMatrix& q, Eigen::Index initial_state, const Eigen::VectorXd& g,
                       double t) {
    if (initial_state < 0 || initial_state >= q.size())
        throw std::invalid_argument("initial state out of range");
    const Eigen::VectorXd v = semigroup_apply(q, g, t);
    return v(initial_state);
}

}  // namespace cplab::exact
