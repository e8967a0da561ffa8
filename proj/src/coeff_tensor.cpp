#include "flspde/coeff_tensor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace flspde {

namespace {

std::size_t pow_size(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

void check_index(int j, const char* what) {
    if (j < 0) throw std::invalid_argument(std::string(what) + ": negative index");
}

} // namespace

// CoefficientGenerator ------------------------------------------------------

CoefficientGenerator::CoefficientGenerator(int degree_cap) : degree_cap_(degree_cap) {}

const PolyRational& CoefficientGenerator::legendre(int n) {
    while (static_cast<int>(legendre_.size()) <= n) {
        legendre_.push_back(legendre_poly(static_cast<int>(legendre_.size()), degree_cap_));
    }
    return legendre_[n];
}

const PolyRational& CoefficientGenerator::inner(int j1) {
    while (static_cast<int>(inner_.size()) <= j1) {
        const int n = static_cast<int>(inner_.size());
        inner_.push_back(legendre(n).integral_from_minus_one());
    }
    return inner_[j1];
}

const PolyRational& CoefficientGenerator::middle(int j2, int j1) {
    const auto key = std::make_pair(j2, j1);
    auto it = middle_.find(key);
    if (it == middle_.end()) {
        PolyRational m = (legendre(j2) * inner(j1)).integral_from_minus_one();
        it = middle_.emplace(key, std::move(m)).first;
    }
    return it->second;
}

Rational CoefficientGenerator::cbar_double(int j2, int j1) {
    check_index(j2, "cbar_double");
    check_index(j1, "cbar_double");
    const PolyRational& in = inner(j1);
    // P_{j2} is orthogonal to every polynomial of lower degree.
    if (j2 > in.degree()) {
        legendre(j2);
        return Rational(0);
    }
    return (legendre(j2) * in).integral_over_reference();
}

Rational CoefficientGenerator::cbar_triple(int j3, int j2, int j1) {
    check_index(j3, "cbar_triple");
    check_index(j2, "cbar_triple");
    check_index(j1, "cbar_triple");
    const PolyRational& mid = middle(j2, j1);
    if (j3 > mid.degree()) {
        legendre(j3);
        return Rational(0);
    }
    return (legendre(j3) * mid).integral_over_reference();
}

Rational cbar_double(int j2, int j1) {
    CoefficientGenerator gen(std::max({j1, j2, kDefaultLegendreDegreeCap}));
    return gen.cbar_double(j2, j1);
}

Rational cbar_triple(int j3, int j2, int j1) {
    CoefficientGenerator gen(std::max({j1, j2, j3, kDefaultLegendreDegreeCap}));
    return gen.cbar_triple(j3, j2, j1);
}

// CoeffTensor ---------------------------------------------------------------

CoeffTensor::CoeffTensor(int order, int max_index, std::vector<Rational> entries)
    : order_(order), max_index_(max_index), entries_(std::move(entries)) {
    if (order != 2 && order != 3) throw std::invalid_argument("CoeffTensor: order must be 2 or 3");
    if (max_index < 0) throw std::invalid_argument("CoeffTensor: negative max_index");
    if (entries_.size() != pow_size(static_cast<std::size_t>(max_index) + 1, order)) {
        throw std::invalid_argument("CoeffTensor: entry count does not match (q+1)^k");
    }
}

CoeffTensor CoeffTensor::build(int order, int max_index) {
    if (order != 2 && order != 3) throw std::invalid_argument("CoeffTensor::build: order must be 2 or 3");
    if (max_index < 0) throw std::invalid_argument("CoeffTensor::build: negative max_index");
    CoefficientGenerator gen(std::max(max_index, kDefaultLegendreDegreeCap));
    const int n = max_index + 1;
    std::vector<Rational> entries;
    entries.reserve(pow_size(static_cast<std::size_t>(n), order));
    if (order == 2) {
        for (int j2 = 0; j2 < n; ++j2)
            for (int j1 = 0; j1 < n; ++j1) entries.push_back(gen.cbar_double(j2, j1));
    } else {
        for (int j3 = 0; j3 < n; ++j3)
            for (int j2 = 0; j2 < n; ++j2)
                for (int j1 = 0; j1 < n; ++j1) entries.push_back(gen.cbar_triple(j3, j2, j1));
    }
    return CoeffTensor(order, max_index, std::move(entries));
}

std::size_t CoeffTensor::flat(std::span<const int> outer_first) const {
    if (static_cast<int>(outer_first.size()) != order_) {
        throw std::invalid_argument("CoeffTensor::at: wrong number of indices");
    }
    std::size_t idx = 0;
    for (int j : outer_first) {
        if (j < 0 || j > max_index_) throw std::out_of_range("CoeffTensor::at: index out of range");
        idx = idx * static_cast<std::size_t>(max_index_ + 1) + static_cast<std::size_t>(j);
    }
    return idx;
}

const Rational& CoeffTensor::at(int j2, int j1) const {
    const int idx[2] = {j2, j1};
    return entries_[flat(idx)];
}

const Rational& CoeffTensor::at(int j3, int j2, int j1) const {
    const int idx[3] = {j3, j2, j1};
    return entries_[flat(idx)];
}

const Rational& CoeffTensor::at(std::span<const int> outer_first) const { return entries_[flat(outer_first)]; }

bool CoeffTensor::operator==(const CoeffTensor& rhs) const {
    return order_ == rhs.order_ && max_index_ == rhs.max_index_ && entries_ == rhs.entries_;
}

double scale_coeff(const Rational& cbar, std::span<const int> indices, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("scale_coeff: step must be positive");
    double weight = 1.0;
    for (int j : indices) weight *= 2.0 * j + 1.0;
    const double k = static_cast<double>(indices.size());
    return std::sqrt(weight) * std::pow(step, 0.5 * k) / std::pow(2.0, k) * cbar.get_d();
}

UnitStepCoefficients UnitStepCoefficients::from(const CoeffTensor& tensor) {
    UnitStepCoefficients out;
    out.order = tensor.order();
    out.max_index = tensor.max_index();
    out.values.resize(tensor.size());
    const int n = tensor.max_index() + 1;
    std::vector<int> idx(static_cast<std::size_t>(tensor.order()), 0);
    for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
        std::size_t rem = flat;
        for (int l = tensor.order() - 1; l >= 0; --l) {
            idx[static_cast<std::size_t>(l)] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        out.values[flat] = scale_coeff(tensor.entries()[flat], idx, 1.0);
    }
    return out;
}

// Residuals -----------------------------------------------------------------

Rational pairwise_defect(long q) {
    if (q < 0) throw std::invalid_argument("pairwise_defect: q must be non-negative");
    // Telescoping: sum_{i=1}^q 1/(4i^2-1) = (1 - 1/(2q+1)) / 2.
    return frac(1, 4 * (2 * q + 1));
}

double pairwise_residual(long q, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("pairwise_residual: step must be positive");
    const Rational s(step);
    return Rational(s * s * pairwise_defect(q)).get_d();
}

namespace {

// Exact Chat^2 = (2j1+1)(2j2+1)(2j3+1)/64 * cbar^2.
Rational chat_squared(const Rational& cbar, int j3, int j2, int j1) {
    if (cbar == 0) return Rational(0);
    return Rational(cbar * cbar) * frac(static_cast<long>(2 * j1 + 1) * (2 * j2 + 1) * (2 * j3 + 1), 64);
}

Rational double_chat_squared(const Rational& cbar, int j2, int j1) {
    if (cbar == 0) return Rational(0);
    return Rational(cbar * cbar) * frac(static_cast<long>(2 * j1 + 1) * (2 * j2 + 1), 16);
}

void require_cover(const CoeffTensor& tensor, int order, int q, const char* what) {
    if (tensor.order() != order) {
        throw std::invalid_argument(std::string(what) + ": tensor has order " + std::to_string(tensor.order()));
    }
    if (q < 0) throw std::invalid_argument(std::string(what) + ": negative truncation");
    if (tensor.max_index() < q) {
        throw std::invalid_argument(std::string(what) + ": tensor max_index " + std::to_string(tensor.max_index()) +
                                    " < truncation " + std::to_string(q));
    }
}

Rational double_defect(int q, const CoeffTensor& tensor) {
    Rational sum = 0;
    for (int j2 = 0; j2 <= q; ++j2)
        for (int j1 = 0; j1 <= q; ++j1) sum += double_chat_squared(tensor.at(j2, j1), j2, j1);
    return frac(1, 2) - sum;
}

} // namespace

Rational triple_defect(int q1, const CoeffTensor& tensor) {
    require_cover(tensor, 3, q1, "triple_defect");
    Rational sum = 0;
    for (int j3 = 0; j3 <= q1; ++j3)
        for (int j2 = 0; j2 <= q1; ++j2)
            for (int j1 = 0; j1 <= q1; ++j1) sum += chat_squared(tensor.at(j3, j2, j1), j3, j2, j1);
    Rational out = frac(1, 6) - sum;
    out.canonicalize();
    return out;
}

double triple_residual(int q1, double step, const CoeffTensor& tensor) {
    if (!(step > 0.0)) throw std::invalid_argument("triple_residual: step must be positive");
    const Rational s(step);
    return Rational(s * s * s * triple_defect(q1, tensor)).get_d();
}

double parseval_gap(int k, int q, double step, const CoeffTensor& tensor) {
    if (!(step > 0.0)) throw std::invalid_argument("parseval_gap: step must be positive");
    const Rational s(step);
    if (k == 2) {
        require_cover(tensor, 2, q, "parseval_gap");
        return Rational(s * s * double_defect(q, tensor)).get_d();
    }
    if (k == 3) {
        return Rational(s * s * s * triple_defect(q, tensor)).get_d();
    }
    throw std::invalid_argument("parseval_gap: k must be 2 or 3");
}

ResidualReport residual_report(int k, int q, double step, const CoeffTensor& tensor) {
    ResidualReport r;
    r.k = k;
    r.q = q;
    r.step = step;
    r.parseval_gap = parseval_gap(k, q, step, tensor);
    r.residual = (k == 2) ? pairwise_residual(q, step) : triple_residual(q, step, tensor);
    return r;
}

namespace {

// Incremental shell sums for the triple defect: shell q1 holds all index
// triples with max(j1, j2, j3) == q1.
class TripleDefectSequence {
public:
    explicit TripleDefectSequence(int degree_cap) : gen_(degree_cap), defect_(frac(1, 6)) {}

    const Rational& advance() {
        const int s = next_;
        Rational shell = 0;
        for (int j3 = 0; j3 <= s; ++j3)
            for (int j2 = 0; j2 <= s; ++j2)
                for (int j1 = 0; j1 <= s; ++j1) {
                    if (j3 != s && j2 != s && j1 != s) continue;
                    shell += chat_squared(gen_.cbar_triple(j3, j2, j1), j3, j2, j1);
                }
        defect_ -= shell;
        defect_.canonicalize();
        ++next_;
        return defect_;
    }

    int last() const { return next_ - 1; }

private:
    CoefficientGenerator gen_;
    Rational defect_;
    int next_ = 0;
};

} // namespace

MinimalQResult minimal_q(double step, ResidualKind kind, const MinimalQOptions& options) {
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("minimal_q: step must lie in (0, 1]");
    const Rational s(step);
    MinimalQResult out;
    out.criterion = Rational(s * s * s * s).get_d();

    if (kind == ResidualKind::Pairwise) {
        // s^2 d(q) <= s^4  <=>  d(q) <= s^2
        const Rational target = s * s;
        const double guess = std::ceil((1.0 / (4.0 * step * step) - 1.0) / 2.0);
        long q = std::max(0L, static_cast<long>(guess) - 2);
        while (pairwise_defect(q) > target) {
            ++q;
            if (q > options.cap) throw SearchCapExceeded("minimal_q: pairwise search exceeded cap");
        }
        while (q > 0 && pairwise_defect(q - 1) <= target) --q;
        if (q > options.cap) throw SearchCapExceeded("minimal_q: pairwise search exceeded cap");
        out.q = q;
        if (q > 0) out.residual_below = pairwise_residual(q - 1, step);
        out.residual_at = pairwise_residual(q, step);
        out.residual_above = pairwise_residual(q + 1, step);
    } else {
        // s^3 e(q1) <= s^4  <=>  e(q1) <= s
        const long limit = std::min<long>(options.cap, options.degree_cap - 1);
        TripleDefectSequence seq(options.degree_cap);
        std::optional<Rational> below;
        Rational at = seq.advance();
        while (at > s) {
            if (seq.last() + 1 > limit) throw SearchCapExceeded("minimal_q: triple search exceeded cap");
            below = at;
            at = seq.advance();
        }
        out.q = seq.last();
        const Rational s3 = s * s * s;
        if (below) out.residual_below = Rational(s3 * *below).get_d();
        out.residual_at = Rational(s3 * at).get_d();
        out.residual_above = Rational(s3 * seq.advance()).get_d();
    }

    const double crit = out.criterion;
    const bool tight_below =
        out.residual_below && (*out.residual_below - crit) / crit < options.boundary_margin;
    const bool tight_at = (crit - out.residual_at) / crit < options.boundary_margin;
    out.boundary = tight_below || tight_at;
    return out;
}

// Cache ---------------------------------------------------------------------

const char* to_string(CacheErrorKind kind) {
    switch (kind) {
    case CacheErrorKind::Io: return "io";
    case CacheErrorKind::MalformedHeader: return "malformed-header";
    case CacheErrorKind::DeclaredOrder: return "declared-order";
    case CacheErrorKind::MalformedEntry: return "malformed-entry";
    case CacheErrorKind::TruncatedEntries: return "truncated-entries";
    case CacheErrorKind::ChecksumMismatch: return "checksum-mismatch";
    }
    return "unknown";
}

std::string serialize_cache(const CoeffTensor& tensor) {
    std::ostringstream os;
    os << "FLC 1 k=" << tensor.order() << " q=" << tensor.max_index() << '\n';
    const int n = tensor.max_index() + 1;
    std::vector<int> idx(static_cast<std::size_t>(tensor.order()), 0);
    for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
        std::size_t rem = flat;
        for (int l = tensor.order() - 1; l >= 0; --l) {
            idx[static_cast<std::size_t>(l)] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        for (int j : idx) os << j << ' ';
        const Rational& v = tensor.entries()[flat];
        os << v.get_num().get_str() << '/' << v.get_den().get_str() << '\n';
    }
    os << "END " << tensor.size() << '\n';
    return os.str();
}

CoeffTensor parse_cache(const std::string& text, std::optional<int> expected_order) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw CacheError(CacheErrorKind::MalformedHeader, "cache: empty file");

    int k = 0;
    int q = 0;
    {
        std::istringstream hs(line);
        std::string magic, version, kfield, qfield, extra;
        if (!(hs >> magic >> version >> kfield >> qfield) || (hs >> extra) || magic != "FLC" || version != "1" ||
            kfield.rfind("k=", 0) != 0 || qfield.rfind("q=", 0) != 0) {
            throw CacheError(CacheErrorKind::MalformedHeader, "cache: malformed header '" + line + "'");
        }
        try {
            std::size_t pos = 0;
            k = std::stoi(kfield.substr(2), &pos);
            if (pos != kfield.size() - 2) throw std::invalid_argument("k");
            q = std::stoi(qfield.substr(2), &pos);
            if (pos != qfield.size() - 2) throw std::invalid_argument("q");
        } catch (const std::exception&) {
            throw CacheError(CacheErrorKind::MalformedHeader, "cache: malformed header '" + line + "'");
        }
    }
    if (k != 2 && k != 3) {
        throw CacheError(CacheErrorKind::DeclaredOrder, "cache: unsupported declared order k=" + std::to_string(k));
    }
    if (expected_order && *expected_order != k) {
        throw CacheError(CacheErrorKind::DeclaredOrder, "cache: declared order k=" + std::to_string(k) +
                                                            ", expected k=" + std::to_string(*expected_order));
    }
    if (q < 0) throw CacheError(CacheErrorKind::MalformedHeader, "cache: negative q");

    const std::size_t n = static_cast<std::size_t>(q) + 1;
    const std::size_t expected_count = pow_size(n, k);
    std::vector<Rational> entries;
    entries.reserve(expected_count);
    bool saw_end = false;
    std::size_t declared_end = 0;
    std::vector<int> idx(static_cast<std::size_t>(k));

    while (std::getline(in, line)) {
        if (line.rfind("END", 0) == 0) {
            std::istringstream es(line.substr(3));
            std::string extra;
            long long count = -1;
            if (!(es >> count) || (es >> extra) || count < 0) {
                throw CacheError(CacheErrorKind::MalformedEntry, "cache: malformed END line");
            }
            declared_end = static_cast<std::size_t>(count);
            saw_end = true;
            break;
        }
        const std::size_t flat = entries.size();
        if (flat >= expected_count) {
            throw CacheError(CacheErrorKind::ChecksumMismatch, "cache: more entries than the header declares");
        }
        std::istringstream es(line);
        for (auto& j : idx) {
            if (!(es >> j)) throw CacheError(CacheErrorKind::MalformedEntry, "cache: bad index in '" + line + "'");
        }
        std::string value, extra;
        if (!(es >> value) || (es >> extra)) {
            throw CacheError(CacheErrorKind::MalformedEntry, "cache: bad entry '" + line + "'");
        }
        // Indices must follow the lexicographic order implied by position.
        std::size_t rem = flat;
        for (int l = k - 1; l >= 0; --l) {
            if (idx[static_cast<std::size_t>(l)] != static_cast<int>(rem % n)) {
                throw CacheError(CacheErrorKind::MalformedEntry, "cache: out-of-order entry '" + line + "'");
            }
            rem /= n;
        }
        Rational r;
        if (value.find('/') == std::string::npos || r.set_str(value, 10) != 0) {
            throw CacheError(CacheErrorKind::MalformedEntry, "cache: bad rational '" + value + "'");
        }
        if (r.get_den() == 0) throw CacheError(CacheErrorKind::MalformedEntry, "cache: zero denominator");
        r.canonicalize();
        entries.push_back(std::move(r));
    }

    if (!saw_end || entries.size() < expected_count) {
        if (saw_end && declared_end != expected_count) {
            throw CacheError(CacheErrorKind::ChecksumMismatch, "cache: END count " + std::to_string(declared_end) +
                                                                   " disagrees with header count " +
                                                                   std::to_string(expected_count));
        }
        throw CacheError(CacheErrorKind::TruncatedEntries, "cache: expected " + std::to_string(expected_count) +
                                                               " entries, found " + std::to_string(entries.size()));
    }
    if (declared_end != expected_count) {
        throw CacheError(CacheErrorKind::ChecksumMismatch, "cache: END count " + std::to_string(declared_end) +
                                                               " disagrees with header count " +
                                                               std::to_string(expected_count));
    }
    return CoeffTensor(k, q, std::move(entries));
}

void save_cache(const CoeffTensor& tensor, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheError(CacheErrorKind::Io, "cache: cannot open '" + path.string() + "' for writing");
    out << serialize_cache(tensor);
    if (!out) throw CacheError(CacheErrorKind::Io, "cache: write failed for '" + path.string() + "'");
}

CoeffTensor load_cache(const std::filesystem::path& path, std::optional<int> expected_order) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError(CacheErrorKind::Io, "cache: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cache(buf.str(), expected_order);
}

std::string text_checksum(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string tensor_checksum(const CoeffTensor& tensor) { return text_checksum(serialize_cache(tensor)); }

} // namespace flspde
