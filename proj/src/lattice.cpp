#include "cplab/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace cplab {

std::string to_string(Boundary b) {
    switch (b) {
        case Boundary::Free: return "free";
        case Boundary::Periodic: return "periodic";
        case Boundary::InfectedExterior: return "infected-exterior";
    }
    throw std::logic_error("unreachable boundary mode");
}

Boundary boundary_from_string(const std::string& s) {
    if (s == "free") return Boundary::Free;
    if (s == "periodic") return Boundary::Periodic;
    if (s == "infected-exterior") return Boundary::InfectedExterior;
    throw std::invalid_argument("unknown boundary mode: " + s);
}

Geometry::Geometry(int dimension, int radius, Boundary boundary)
    : d_(dimension), m_(radius), boundary_(boundary) {
    if (d_ < 1) throw std::invalid_argument("dimension must be positive");
    if (m_ < 0) throw std::invalid_argument("radius must be non-negative");
    const int side = 2 * m_ + 1;
    double count = 1;
    for (int a = 0; a < d_; ++a) count *= side;
    if (count > (1 << 24)) throw std::invalid_argument("window too large");
    sites_ = static_cast<int>(count);

    neighbor_table_.assign(static_cast<std::size_t>(sites_) * static_cast<std::size_t>(2 * d_), -1);
    exterior_degree_.assign(static_cast<std::size_t>(sites_), 0);
    sup_norm_.assign(static_cast<std::size_t>(sites_), 0);

    std::vector<int> coord(static_cast<std::size_t>(d_));
    for (Site s = 0; s < sites_; ++s) {
        int rem = s;
        int norm = 0;
        for (int a = d_ - 1; a >= 0; --a) {
            coord[static_cast<std::size_t>(a)] = rem % side - m_;
            rem /= side;
            norm = std::max(norm, std::abs(coord[static_cast<std::size_t>(a)]));
        }
        sup_norm_[static_cast<std::size_t>(s)] = static_cast<std::int16_t>(norm);
        for (int k = 0; k < 2 * d_; ++k) {
            const int axis = k / 2;
            const int step = (k % 2) ? 1 : -1;
            const int c = coord[static_cast<std::size_t>(axis)] + step;
            Site nb = -1;
            if (c >= -m_ && c <= m_) {
                nb = s + step * stride(axis, side, d_);
            } else if (boundary_ == Boundary::Periodic) {
                nb = s - step * (side - 1) * stride(axis, side, d_);
            } else {
                exterior_degree_[static_cast<std::size_t>(s)]++;
            }
            neighbor_table_[static_cast<std::size_t>(s) * static_cast<std::size_t>(2 * d_) +
                            static_cast<std::size_t>(k)] = nb;
        }
    }
}

int Geometry::stride(int axis, int side, int d) {
    int st = 1;
    for (int a = axis + 1; a < d; ++a) st *= side;
    return st;
}

Site Geometry::index_of(std::span<const int> coord) const {
    if (static_cast<int>(coord.size()) != d_) throw std::invalid_argument("coordinate arity mismatch");
    const int side = 2 * m_ + 1;
    Site s = 0;
    for (int a = 0; a < d_; ++a) {
        const int c = coord[static_cast<std::size_t>(a)];
        if (c < -m_ || c > m_) throw std::domain_error("coordinate outside window");
        s = s * side + (c + m_);
    }
    return s;
}

std::vector<int> Geometry::coord_of(Site s) const {
    if (s < 0 || s >= sites_) throw std::domain_error("site outside window");
    const int side = 2 * m_ + 1;
    std::vector<int> coord(static_cast<std::size_t>(d_));
    int rem = s;
    for (int a = d_ - 1; a >= 0; --a) {
        coord[static_cast<std::size_t>(a)] = rem % side - m_;
        rem /= side;
    }
    return coord;
}

std::vector<Site> Geometry::neighbors(Site s) const {
    if (s < 0 || s >= sites_) throw std::domain_error("site outside window");
    std::vector<Site> out;
    out.reserve(static_cast<std::size_t>(2 * d_));
    for (int k = 0; k < 2 * d_; ++k) {
        const Site nb = neighbor(s, k);
        if (nb >= 0) out.push_back(nb);
    }
    return out;
}

GeometryPtr make_geometry(int dimension, int radius, Boundary boundary) {
    return std::make_shared<const Geometry>(dimension, radius, boundary);
}

Configuration::Configuration(GeometryPtr geometry, bool all_infected)
    : geom_(std::move(geometry)),
      words_(static_cast<std::size_t>((geom_->site_count() + 63) / 64), 0),
      count_(0) {
    if (all_infected) {
        const int n = geom_->site_count();
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] = ~0ULL;
        const int tail = n & 63;
        if (tail) words_.back() &= (1ULL << tail) - 1;
        count_ = n;
    }
}

bool Configuration::is_subset_of(const Configuration& other) const {
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w] & ~other.words_[w]) return false;
    return true;
}

bool Configuration::operator==(const Configuration& other) const {
    return geom_->same_shape(other.geometry()) && words_ == other.words_;
}

std::vector<Site> Configuration::infected_sites() const {
    std::vector<Site> out;
    out.reserve(static_cast<std::size_t>(count_));
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits) {
            const int b = std::countr_zero(bits);
            out.push_back(static_cast<Site>(w * 64 + static_cast<std::size_t>(b)));
            bits &= bits - 1;
        }
    }
    return out;
}

std::string Configuration::to_hex() const {
    static const char* digits = "0123456789abcdef";
    const int nbytes = (geom_->site_count() + 7) / 8;
    std::string out;
    out.reserve(static_cast<std::size_t>(2 * nbytes));
    for (int i = 0; i < nbytes; ++i) {
        const std::uint8_t byte =
            static_cast<std::uint8_t>(words_[static_cast<std::size_t>(i) >> 3] >> ((i & 7) * 8));
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 15]);
    }
    return out;
}

Configuration Configuration::from_hex(GeometryPtr geometry, const std::string& hex) {
    Configuration c(std::move(geometry));
    const int nbytes = (c.geometry().site_count() + 7) / 8;
    if (static_cast<int>(hex.size()) != 2 * nbytes)
        throw std::invalid_argument("hex string length mismatch");
    auto nibble = [](char ch) -> std::uint64_t {
        if (ch >= '0' && ch <= '9') return static_cast<std::uint64_t>(ch - '0');
        if (ch >= 'a' && ch <= 'f') return static_cast<std::uint64_t>(ch - 'a' + 10);
        if (ch >= 'A' && ch <= 'F') return static_cast<std::uint64_t>(ch - 'A' + 10);
        throw std::invalid_argument("invalid hex digit");
    };
    for (int i = 0; i < nbytes; ++i) {
        const std::uint64_t byte =
            (nibble(hex[static_cast<std::size_t>(2 * i)]) << 4) | nibble(hex[static_cast<std::size_t>(2 * i + 1)]);
        c.words_[static_cast<std::size_t>(i) >> 3] |= byte << ((i & 7) * 8);
    }
    const int n = c.geometry().site_count();
    const int tail = n & 63;
    if (tail && (c.words_.back() & ~((1ULL << tail) - 1)))
        throw std::invalid_argument("hex string sets bits beyond window");
    c.count_ = 0;
    for (const auto w : c.words_) c.count_ += std::popcount(w);
    return c;
}

Configuration set_union(const Configuration& a, const Configuration& b) {
    if (!a.geometry().same_shape(b.geometry())) throw std::invalid_argument("geometry mismatch");
    Configuration out(a.geom_);
    out.count_ = 0;
    for (std::size_t w = 0; w < out.words_.size(); ++w) {
        out.words_[w] = a.words_[w] | b.words_[w];
        out.count_ += std::popcount(out.words_[w]);
    }
    return out;
}

Configuration set_intersection(const Configuration& a, const Configuration& b) {
    if (!a.geometry().same_shape(b.geometry())) throw std::invalid_argument("geometry mismatch");
    Configuration out(a.geom_);
    out.count_ = 0;
    for (std::size_t w = 0; w < out.words_.size(); ++w) {
        out.words_[w] = a.words_[w] & b.words_[w];
        out.count_ += std::popcount(out.words_[w]);
    }
    return out;
}

Configuration flip(const Configuration& config, Site x) {
    if (x < 0 || x >= config.geometry().site_count()) throw std::domain_error("flip site outside window");
    Configuration out = config;
    out.assign(x, !out.test(x));
    return out;
}

std::pair<std::vector<Site>, std::int64_t> sym_diff(const Configuration& a, const Configuration& b) {
    if (!a.geometry().same_shape(b.geometry())) throw std::invalid_argument("geometry mismatch");
    std::vector<Site> sites;
    std::int64_t count = 0;
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t w = 0; w < wa.size(); ++w) {
        std::uint64_t bits = wa[w] ^ wb[w];
        count += std::popcount(bits);
        while (bits) {
            const int bit = std::countr_zero(bits);
            sites.push_back(static_cast<Site>(w * 64 + static_cast<std::size_t>(bit)));
            bits &= bits - 1;
        }
    }
    return {std::move(sites), count};
}

std::int64_t sym_diff_count(const Configuration& a, const Configuration& b) {
    if (!a.geometry().same_shape(b.geometry())) throw std::invalid_argument("geometry mismatch");
    const auto wa = a.words();
    const auto wb = b.words();
    std::int64_t count = 0;
    for (std::size_t w = 0; w < wa.size(); ++w) count += std::popcount(wa[w] ^ wb[w]);
    return count;
}

LocalFunction::LocalFunction(std::vector<Site> support, std::vector<std::complex<double>> table)
    : support_(std::move(support)), table_(std::move(table)) {
    if (static_cast<int>(support_.size()) > kMaxSupport)
        throw std::invalid_argument("support larger than 16 sites");
    if (table_.size() != (std::size_t{1} << support_.size()))
        throw std::invalid_argument("table size must be 2^|support|");
    for (std::size_t i = 1; i < support_.size(); ++i)
        if (support_[i] <= support_[i - 1])
            throw std::invalid_argument("support sites must be strictly increasing");

    delta_.assign(support_.size(), 0.0);
    const std::uint32_t n = static_cast<std::uint32_t>(table_.size());
    for (std::size_t i = 0; i < support_.size(); ++i) {
        double best = 0.0;
        const std::uint32_t bit = 1u << i;
        for (std::uint32_t m = 0; m < n; ++m) {
            if (m & bit) continue;
            best = std::max(best, std::abs(table_[m | bit] - table_[m]));
        }
        delta_[i] = best;
    }
}

LocalFunction LocalFunction::site_indicator(Site x) {
    return LocalFunction({x}, {std::complex<double>(0.0), std::complex<double>(1.0)});
}

LocalFunction LocalFunction::constant(std::complex<double> c) { return LocalFunction({}, {c}); }

std::uint32_t LocalFunction::mask_of(const Configuration& c) const {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < support_.size(); ++i)
        mask |= static_cast<std::uint32_t>(c.test(support_[i])) << i;
    return mask;
}

std::complex<double> LocalFunction::eval(const Configuration& c) const {
    return table_[mask_of(c)];
}

double LocalFunction::delta(Site x) const {
    const auto it = std::lower_bound(support_.begin(), support_.end(), x);
    if (it == support_.end() || *it != x) return 0.0;
    return delta_[static_cast<std::size_t>(it - support_.begin())];
}

double LocalFunction::delta_sum_squares() const {
    double s = 0.0;
    for (const double dl : delta_) s += dl * dl;
    return s;
}

double LocalFunction::max_abs() const {
    double s = 0.0;
    for (const auto& v : table_) s = std::max(s, std::abs(v));
    return s;
}

std::vector<std::pair<Site, double>> delta_profile(const LocalFunction& f) {
    std::vector<std::pair<Site, double>> out;
    out.reserve(f.support_.size());
    for (std::size_t i = 0; i < f.support_.size(); ++i) out.emplace_back(f.support_[i], f.delta_[i]);
    return out;
}

}  // namespace cplab
