#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cplab {

enum class Boundary { Free, Periodic, InfectedExterior };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Flat index of a window site, row-major over {-M..M}^d.
using Site = std::int32_t;

/// Infection rate per directed edge; recovery rate is fixed at 1.
struct ModelParams {
    double lambda = 1.0;
};

/// A finite window Lambda_M = {-M..M}^d with one of three boundary modes.
/// Neighbor structure is precomputed; instances are immutable and shared.
class Geometry {
public:
    Geometry(int dimension, int radius, Boundary boundary);

    int dimension() const { return d_; }
    int radius() const { return m_; }
    Boundary boundary() const { return boundary_; }
    int site_count() const { return sites_; }
    int directions() const { return 2 * d_; }

    Site index_of(std::span<const int> coord) const;
    std::vector<int> coord_of(Site s) const;

    /// Chebyshev norm of the site's coordinate vector.
    int sup_norm(Site s) const { return sup_norm_[static_cast<std::size_t>(s)]; }

    /// Neighbor along direction k (axis k/2, sign k%2 ? +1 : -1), or -1 when
    /// the step leaves the window (Free / InfectedExterior only).
    Site neighbor(Site s, int dir) const {
        return neighbor_table_[static_cast<std::size_t>(s) * static_cast<std::size_t>(2 * d_) +
                               static_cast<std::size_t>(dir)];
    }

    /// In-window neighbors of s.
    std::vector<Site> neighbors(Site s) const;

    /// Number of edges from s that leave the window; 0 under Periodic.
    int exterior_degree(Site s) const { return exterior_degree_[static_cast<std::size_t>(s)]; }

    static int opposite(int dir) { return dir ^ 1; }

    bool same_shape(const Geometry& other) const {
        return d_ == other.d_ && m_ == other.m_ && boundary_ == other.boundary_;
    }

private:
    static int stride(int axis, int side, int d);

    int d_;
    int m_;
    Boundary boundary_;
    int sites_;
    std::vector<Site> neighbor_table_;    // sites x 2d, -1 marks exterior
    std::vector<std::int16_t> exterior_degree_;
    std::vector<std::int16_t> sup_norm_;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

GeometryPtr make_geometry(int dimension, int radius, Boundary boundary);

/// A set of infected window sites, stored as a bitset, plus the implicit
/// exterior value (1 exactly when the boundary mode is InfectedExterior).
class Configuration {
public:
    explicit Configuration(GeometryPtr geometry, bool all_infected = false);

    const Geometry& geometry() const { return *geom_; }
    const GeometryPtr& geometry_ptr() const { return geom_; }

    bool test(Site s) const {
        return (words_[static_cast<std::size_t>(s) >> 6] >> (static_cast<std::size_t>(s) & 63)) & 1u;
    }
    void set(Site s) {
        std::uint64_t& w = words_[static_cast<std::size_t>(s) >> 6];
        const std::uint64_t bit = 1ULL << (static_cast<std::size_t>(s) & 63);
        count_ += !(w & bit);
        w |= bit;
    }
    void clear(Site s) {
        std::uint64_t& w = words_[static_cast<std::size_t>(s) >> 6];
        const std::uint64_t bit = 1ULL << (static_cast<std::size_t>(s) & 63);
        count_ -= !!(w & bit);
        w &= ~bit;
    }
    void assign(Site s, bool value) { value ? set(s) : clear(s); }

    std::int64_t count() const { return count_; }
    bool none() const { return count_ == 0; }
    int exterior_value() const { return geom_->boundary() == Boundary::InfectedExterior ? 1 : 0; }

    std::span<const std::uint64_t> words() const { return words_; }

    bool is_subset_of(const Configuration& other) const;
    bool operator==(const Configuration& other) const;

    /// Sites currently infected, ascending.
    std::vector<Site> infected_sites() const;

    /// Bitset as a lowercase hex string, byte i covering sites 8i..8i+7
    /// (LSB first).
    std::string to_hex() const;
    static Configuration from_hex(GeometryPtr geometry, const std::string& hex);

    friend Configuration set_union(const Configuration& a, const Configuration& b);
    friend Configuration set_intersection(const Configuration& a, const Configuration& b);

private:
    GeometryPtr geom_;
    std::vector<std::uint64_t> words_;
    std::int64_t count_;
};

/// Copy of `config` flipped at x. Throws std::domain_error off-window.
Configuration flip(const Configuration& config, Site x);

/// Symmetric difference a/b: (sites, count). Throws on geometry mismatch.
std::pair<std::vector<Site>, std::int64_t> sym_diff(const Configuration& a, const Configuration& b);

std::int64_t sym_diff_count(const Configuration& a, const Configuration& b);

/// Complex-valued function of finitely many sites, stored as an explicit
/// table over the 2^|support| restrictions. Construction precomputes the
/// per-site influence profile delta_f(x) = max |f(eta^x) - f(eta)|.
class LocalFunction {
public:
    static constexpr int kMaxSupport = 16;

    LocalFunction(std::vector<Site> support, std::vector<std::complex<double>> table);

    static LocalFunction site_indicator(Site x);
    static LocalFunction constant(std::complex<double> c);

    const std::vector<Site>& support() const { return support_; }
    const std::vector<std::complex<double>>& table() const { return table_; }

    std::complex<double> eval_mask(std::uint32_t mask) const {
        return table_[static_cast<std::size_t>(mask)];
    }
    std::complex<double> eval(const Configuration& c) const;

    /// Restriction mask of `c` over the support sites (bit i = support[i]).
    std::uint32_t mask_of(const Configuration& c) const;

    double delta(Site x) const;
    double delta_sum_squares() const;
    double max_abs() const;

    friend std::vector<std::pair<Site, double>> delta_profile(const LocalFunction& f);

private:
    std::vector<Site> support_;
    std::vector<std::complex<double>> table_;
    std::vector<double> delta_;  // aligned with support_
};

/// delta_f as (site, value) pairs over the support, exact by enumeration.
std::vector<std::pair<Site, double>> delta_profile(const LocalFunction& f);

}  // namespace cplab
