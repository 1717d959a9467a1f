#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "cplab/lattice.hpp"

namespace cplab::exact {

/// InfectedBoundary: all-infected exterior, irreducible chain.
/// Absorbing: free boundary, the empty configuration is absorbing.
/// NoRecovery: infections only (the first-passage growth chain).
enum class Flavor { InfectedBoundary, Absorbing, NoRecovery };

/// Enumeration of {0,1}^{Lambda_N}: state index == infected-site bitmask,
/// bit order row-major over the window, so index 0 is the empty set.
struct StateSpace {
    int d;
    int N;
    int sites;
    std::size_t size;

    StateSpace(int d, int N);

    std::uint32_t mask_of(const Configuration& c) const;
    Configuration config_of(std::uint32_t mask, const GeometryPtr& geometry) const;
};

/// Dense generator over a StateSpace (possibly plus one absorbing guard
/// state appended at the end). Immutable after build.
class RateMatrix {
public:
    RateMatrix(Eigen::MatrixXd m, Flavor flavor, int d, int N, double lambda, int guard_state = -1);

    const Eigen::MatrixXd& matrix() const { return m_; }
    Eigen::Index size() const { return m_.rows(); }
    Flavor flavor() const { return flavor_; }
    int d() const { return d_; }
    int N() const { return n_; }
    int sites() const { return sites_; }
    double lambda() const { return lambda_; }

    /// Index of the appended guard state, or -1.
    int guard_state() const { return guard_state_; }

private:
    Eigen::MatrixXd m_;
    Flavor flavor_;
    int d_;
    int n_;
    int sites_;
    double lambda_;
    int guard_state_;
};

/// Hard cap on dense state counts (d=1 up to N=5; d=2 up to N=1).
inline constexpr std::size_t kDenseStateCap = 2048;

/// Contact-process generator on {0,1}^{Lambda_N}. Entry (s, s^x) is 1 when x
/// is infected in s, and lambda times the number of infected neighbours of x
/// (exterior neighbours count as infected under InfectedBoundary) when x is
/// healthy. Throws when the state count exceeds the dense cap.
RateMatrix build_generator(int d, int N, double lambda, Flavor flavor);

/// Free-boundary chain extended with one absorbing state reached at rate
/// lambda per (infected site, exterior edge) pair, i.e. at the first
/// infection leaving Lambda_N. Evaluating hit probabilities on this chain
/// gives exact "intersects eta by time t or exits Lambda_N" values for the
/// process on the full lattice.
RateMatrix build_guarded_generator(int d, int N, double lambda);

/// Generator of the pair (a, b) evolved under one shared event stream:
/// recoveries and infection arrows act on both components simultaneously.
/// Pair state index is a | (b << sites).
RateMatrix build_coupled_generator(int d, int N, double lambda, Flavor flavor);

/// Stationary probability vector of an irreducible generator, by direct
/// solve of the adjoint null space with sum-to-one normalization. Throws if
/// the residual exceeds 1e-10.
Eigen::VectorXd stationary(const RateMatrix& q);

/// Power iteration on the uniformized chain; independent cross-check.
Eigen::VectorXd stationary_power_iteration(const RateMatrix& q, int max_iters = 200000,
                                           double tol = 1e-12);

/// e^{tQ} f by uniformization; sup-norm truncation error below 1e-12.
Eigen::VectorXcd semigroup_apply(const RateMatrix& q, const Eigen::VectorXcd& f, double t);
Eigen::VectorXd semigroup_apply(const RateMatrix& q, const Eigen::VectorXd& f, double t);

/// Distribution at time t from initial distribution rho0 (row form).
Eigen::VectorXd distribution_at(const RateMatrix& q, const Eigen::VectorXd& rho0, double t);

struct Spectrum {
    std::vector<std::complex<double>> eigenvalues;
};

struct EigenSystem {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // columns are right eigenvectors
};

/// Full complex spectrum; dense solve capped at kDenseStateCap states.
Spectrum spectrum(const RateMatrix& q);
EigenSystem eigen_system(const RateMatrix& q);

/// Eigenvalues within `tol` of zero (in modulus).
int zero_multiplicity(const Spectrum& sp, double tol = 1e-8);

/// min { -Re(z) : z eigenvalue, z != 0 }.
double spectral_gap(const Spectrum& sp, double tol = 1e-8);

double variance(const Eigen::VectorXd& mu, const Eigen::VectorXcd& f);
double variance(const Eigen::VectorXd& mu, const Eigen::VectorXd& f);

/// P(extinct by time t) from initial mask, on an Absorbing-flavor chain.
double exact_extinction(const RateMatrix& q_absorbing, std::uint32_t initial_mask, double t);

/// [e^{tQ} g](initial) for an arbitrary indicator/payoff vector g.
double hit_probability(const RateMatrix& q, Eigen::Index initial_state, const Eigen::VectorXd& g,
                       double t);

}  // namespace cplab::exact
