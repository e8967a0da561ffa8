#include "flspde/ito_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace flspde {

namespace {

void check_component(const GaussianBasisDraws& d, int r, const char* what) {
    if (r < 1 || r > d.m) {
        throw std::out_of_range(std::string(what) + ": component " + std::to_string(r) + " outside 1.." +
                                std::to_string(d.m));
    }
}

void check_truncation(const GaussianBasisDraws& d, int q, const char* what) {
    if (q < 0 || q > d.q_max) {
        throw std::invalid_argument(std::string(what) + ": truncation " + std::to_string(q) +
                                    " outside draws range 0.." + std::to_string(d.q_max));
    }
}

void check_step(double step, const char* what) {
    if (!(step > 0.0)) throw std::invalid_argument(std::string(what) + ": step must be positive");
}

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

} // namespace

GaussianBasisDraws GaussianBasisDraws::zeros(int m, int q_max) {
    if (m < 1 || q_max < 0) throw std::invalid_argument("GaussianBasisDraws: need m >= 1 and q_max >= 0");
    GaussianBasisDraws d;
    d.m = m;
    d.q_max = q_max;
    d.values.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(q_max + 1), 0.0);
    return d;
}

GaussianBasisDraws draw_basis(RandomStream& stream, int m, int q_max) {
    GaussianBasisDraws d = GaussianBasisDraws::zeros(m, q_max);
    for (double& v : d.values) v = stream.normal();
    return d;
}

double approx_I1(const GaussianBasisDraws& d, int r, double step) {
    check_component(d, r, "approx_I1");
    check_step(step, "approx_I1");
    return std::sqrt(step) * d(r, 0);
}

double approx_I01(const GaussianBasisDraws& d, int r, double step) {
    check_component(d, r, "approx_I01");
    check_truncation(d, 1, "approx_I01");
    check_step(step, "approx_I01");
    return 0.5 * std::pow(step, 1.5) * (d(r, 0) + kInvSqrt3 * d(r, 1));
}

double approx_I10(const GaussianBasisDraws& d, int r, double step) {
    check_component(d, r, "approx_I10");
    check_truncation(d, 1, "approx_I10");
    check_step(step, "approx_I10");
    return 0.5 * std::pow(step, 1.5) * (d(r, 0) - kInvSqrt3 * d(r, 1));
}

double approx_I11(const GaussianBasisDraws& d, int r1, int r2, int q, double step) {
    check_component(d, r1, "approx_I11");
    check_component(d, r2, "approx_I11");
    check_truncation(d, q, "approx_I11");
    check_step(step, "approx_I11");
    double s = d(r1, 0) * d(r2, 0);
    for (int i = 1; i <= q; ++i) {
        s += (d(r1, i - 1) * d(r2, i) - d(r1, i) * d(r2, i - 1)) / std::sqrt(4.0 * i * i - 1.0);
    }
    if (r1 == r2) s -= 1.0;
    return 0.5 * step * s;
}

double approx_I111(const GaussianBasisDraws& d, int r1, int r2, int r3, int q1, const UnitStepCoefficients& c3,
                   double step) {
    check_component(d, r1, "approx_I111");
    check_component(d, r2, "approx_I111");
    check_component(d, r3, "approx_I111");
    check_truncation(d, q1, "approx_I111");
    check_step(step, "approx_I111");
    if (c3.order != 3 || c3.max_index < q1) {
        throw std::invalid_argument("approx_I111: coefficient tensor does not cover q1=" + std::to_string(q1));
    }
    double s = 0.0;
    for (int j3 = 0; j3 <= q1; ++j3)
        for (int j2 = 0; j2 <= q1; ++j2)
            for (int j1 = 0; j1 <= q1; ++j1) {
                const double c = c3.at(j3, j2, j1);
                if (c == 0.0) continue;
                double t = d(r1, j1) * d(r2, j2) * d(r3, j3);
                if (r1 == r2 && j1 == j2) t -= d(r3, j3);
                if (r2 == r3 && j2 == j3) t -= d(r1, j1);
                if (r1 == r3 && j1 == j3) t -= d(r2, j2);
                s += c * t;
            }
    return std::pow(step, 1.5) * s;
}

ItoIntegralBundle build_bundle(const GaussianBasisDraws& d, const BundleRequest& req, const UnitStepCoefficients& c3,
                               double step) {
    check_step(step, "build_bundle");
    if (req.M < 1) throw std::invalid_argument("build_bundle: M must be >= 1");
    if (req.M > req.max_M) {
        throw std::invalid_argument("build_bundle: M=" + std::to_string(req.M) + " exceeds cap " +
                                    std::to_string(req.max_M));
    }
    if (req.M > d.m) throw std::invalid_argument("build_bundle: draws hold fewer than M components");
    check_truncation(d, std::max(req.q, 1), "build_bundle");
    if (req.triples) {
        check_truncation(d, req.q1, "build_bundle");
        if (c3.order != 3 || c3.max_index < req.q1) {
            throw std::invalid_argument("build_bundle: coefficient tensor does not cover q1=" + std::to_string(req.q1));
        }
    }

    const int M = req.M;
    const auto m = static_cast<std::size_t>(M);
    ItoIntegralBundle b;
    b.step = step;
    b.M = M;
    b.q = req.q;
    b.q1 = req.triples ? req.q1 : 0;
    b.I1.resize(m);
    b.I01.resize(m);
    b.I10.resize(m);
    const double sq = std::sqrt(step);
    const double h32 = 0.5 * step * sq;
    for (int r = 1; r <= M; ++r) {
        const auto k = static_cast<std::size_t>(r - 1);
        b.I1[k] = sq * d(r, 0);
        b.I01[k] = h32 * (d(r, 0) + kInvSqrt3 * d(r, 1));
        b.I10[k] = h32 * (d(r, 0) - kInvSqrt3 * d(r, 1));
    }

    b.I11.resize(m * m);
    std::vector<double> w(static_cast<std::size_t>(req.q + 1), 0.0);
    for (int i = 1; i <= req.q; ++i) w[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(4.0 * i * i - 1.0);
    for (int r1 = 1; r1 <= M; ++r1) {
        const auto a = d.row(r1);
        for (int r2 = 1; r2 <= M; ++r2) {
            const auto c = d.row(r2);
            double s = a[0] * c[0];
            for (int i = 1; i <= req.q; ++i) {
                const auto u = static_cast<std::size_t>(i);
                s += w[u] * (a[u - 1] * c[u] - a[u] * c[u - 1]);
            }
            if (r1 == r2) s -= 1.0;
            b.I11[static_cast<std::size_t>(r1 - 1) * m + static_cast<std::size_t>(r2 - 1)] = 0.5 * step * s;
        }
    }

    if (!req.triples) return b;

    // Contract one index at a time: j1 against r1, j2 against r2, j3 against r3.
    const int n = req.q1 + 1;
    const auto nn = static_cast<std::size_t>(n);
    std::vector<double> t1(nn * nn * m, 0.0); // [j3][j2][r1]
    for (int j3 = 0; j3 < n; ++j3)
        for (int j2 = 0; j2 < n; ++j2)
            for (int j1 = 0; j1 < n; ++j1) {
                const double c = c3.at(j3, j2, j1);
                if (c == 0.0) continue;
                double* dst = &t1[(static_cast<std::size_t>(j3) * nn + static_cast<std::size_t>(j2)) * m];
                for (int r1 = 1; r1 <= M; ++r1) dst[r1 - 1] += c * d(r1, j1);
            }
    std::vector<double> t2(nn * m * m, 0.0); // [j3][r2][r1]
    for (int j3 = 0; j3 < n; ++j3)
        for (int j2 = 0; j2 < n; ++j2) {
            const double* src = &t1[(static_cast<std::size_t>(j3) * nn + static_cast<std::size_t>(j2)) * m];
            for (int r2 = 1; r2 <= M; ++r2) {
                const double z = d(r2, j2);
                if (z == 0.0) continue;
                double* dst = &t2[(static_cast<std::size_t>(j3) * m + static_cast<std::size_t>(r2 - 1)) * m];
                for (std::size_t r1 = 0; r1 < m; ++r1) dst[r1] += z * src[r1];
            }
        }

    // Indicator corrections: contractions of C over a repeated index pair.
    std::vector<double> d12(nn, 0.0), d23(nn, 0.0), d13(nn, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            d12[static_cast<std::size_t>(l)] += c3.at(l, j, j);
            d23[static_cast<std::size_t>(l)] += c3.at(j, j, l);
            d13[static_cast<std::size_t>(l)] += c3.at(j, l, j);
        }
    auto dot = [&](const std::vector<double>& v, int r) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += v[static_cast<std::size_t>(j)] * d(r, j);
        return s;
    };
    std::vector<double> e12(m), e23(m), e13(m);
    for (int r = 1; r <= M; ++r) {
        e12[static_cast<std::size_t>(r - 1)] = dot(d12, r);
        e23[static_cast<std::size_t>(r - 1)] = dot(d23, r);
        e13[static_cast<std::size_t>(r - 1)] = dot(d13, r);
    }

    const double h3 = step * sq;
    b.I111.assign(m * m * m, 0.0);
    for (int r1 = 1; r1 <= M; ++r1)
        for (int r2 = 1; r2 <= M; ++r2)
            for (int r3 = 1; r3 <= M; ++r3) {
                double s = 0.0;
                for (int j3 = 0; j3 < n; ++j3) {
                    s += d(r3, j3) *
                         t2[(static_cast<std::size_t>(j3) * m + static_cast<std::size_t>(r2 - 1)) * m +
                            static_cast<std::size_t>(r1 - 1)];
                }
                if (r1 == r2) s -= e12[static_cast<std::size_t>(r3 - 1)];
                if (r2 == r3) s -= e23[static_cast<std::size_t>(r1 - 1)];
                if (r1 == r3) s -= e13[static_cast<std::size_t>(r2 - 1)];
                b.I111[(static_cast<std::size_t>(r1 - 1) * m + static_cast<std::size_t>(r2 - 1)) * m +
                       static_cast<std::size_t>(r3 - 1)] = h3 * s;
            }
    return b;
}

namespace {

void partitions_rec(int k, std::vector<bool>& used, int pairs_left, int singles_left, PairPartition& cur,
                    std::vector<PairPartition>& out) {
    int first = -1;
    for (int a = 1; a <= k; ++a)
        if (!used[static_cast<std::size_t>(a)]) {
            first = a;
            break;
        }
    if (first < 0) {
        out.push_back(cur);
        return;
    }
    used[static_cast<std::size_t>(first)] = true;
    if (singles_left > 0) {
        cur.singles.push_back(first);
        partitions_rec(k, used, pairs_left, singles_left - 1, cur, out);
        cur.singles.pop_back();
    }
    if (pairs_left > 0) {
        for (int b = first + 1; b <= k; ++b) {
            if (used[static_cast<std::size_t>(b)]) continue;
            used[static_cast<std::size_t>(b)] = true;
            cur.pairs.emplace_back(first, b);
            partitions_rec(k, used, pairs_left - 1, singles_left, cur, out);
            cur.pairs.pop_back();
            used[static_cast<std::size_t>(b)] = false;
        }
    }
    used[static_cast<std::size_t>(first)] = false;
}

} // namespace

std::vector<PairPartition> enumerate_pair_partitions(int k, int r) {
    if (k < 0 || r < 0 || 2 * r > k) throw std::invalid_argument("enumerate_pair_partitions: need 0 <= 2r <= k");
    std::vector<PairPartition> out;
    std::vector<bool> used(static_cast<std::size_t>(k + 1), false);
    PairPartition cur;
    partitions_rec(k, used, r, k - 2 * r, cur, out);
    return out;
}

CoeffAccessor tensor_accessor(const CoeffTensor& tensor, double step) {
    check_step(step, "tensor_accessor");
    const int k = tensor.order();
    // Converted once; the accessor owns its copy.
    auto values = std::make_shared<std::vector<double>>(tensor.size());
    const int n = tensor.max_index() + 1;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
        std::size_t rem = flat;
        for (int l = k - 1; l >= 0; --l) {
            idx[static_cast<std::size_t>(l)] = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
        }
        (*values)[flat] = scale_coeff(tensor.entries()[flat], idx, step);
    }
    const int q = tensor.max_index();
    return [values, k, n, q](std::span<const int> j) {
        if (static_cast<int>(j.size()) != k) throw std::invalid_argument("tensor_accessor: wrong multiplicity");
        std::size_t flat = 0;
        for (int l = k - 1; l >= 0; --l) {
            const int v = j[static_cast<std::size_t>(l)];
            if (v < 0 || v > q) throw std::out_of_range("tensor_accessor: index beyond tensor");
            flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(v);
        }
        return (*values)[flat];
    };
}

double approx_general_k(const GaussianBasisDraws& d, std::span<const int> i, std::span<const int> p,
                        const CoeffAccessor& coeff, double step) {
    check_step(step, "approx_general_k");
    const int k = static_cast<int>(i.size());
    if (k < 1 || p.size() != i.size()) {
        throw std::invalid_argument("approx_general_k: indices and truncations must have equal positive length");
    }
    for (int l = 0; l < k; ++l) {
        const int comp = i[static_cast<std::size_t>(l)];
        if (comp < 0 || comp > d.m) throw std::out_of_range("approx_general_k: component outside 0..m");
        const int pl = p[static_cast<std::size_t>(l)];
        if (pl < 0) throw std::invalid_argument("approx_general_k: negative truncation");
        if (comp != 0 && pl > d.q_max) {
            throw std::invalid_argument("approx_general_k: truncation beyond draws q_max");
        }
    }

    std::vector<std::vector<PairPartition>> parts;
    for (int r = 1; 2 * r <= k; ++r) parts.push_back(enumerate_pair_partitions(k, r));

    const double sq = std::sqrt(step);
    auto zeta = [&](int l, int j) {
        const int comp = i[static_cast<std::size_t>(l)];
        if (comp == 0) return j == 0 ? sq : 0.0;
        return d(comp, j);
    };

    std::vector<int> j(static_cast<std::size_t>(k), 0);
    double total = 0.0;
    while (true) {
        const double c = coeff(j);
        if (c != 0.0) {
            double term = 1.0;
            for (int l = 0; l < k; ++l) term *= zeta(l, j[static_cast<std::size_t>(l)]);
            for (std::size_t ri = 0; ri < parts.size(); ++ri) {
                const double sign = (ri % 2 == 0) ? -1.0 : 1.0;
                for (const PairPartition& part : parts[ri]) {
                    bool active = true;
                    for (const auto& [a, b] : part.pairs) {
                        const auto ua = static_cast<std::size_t>(a - 1);
                        const auto ub = static_cast<std::size_t>(b - 1);
                        if (i[ua] == 0 || i[ua] != i[ub] || j[ua] != j[ub]) {
                            active = false;
                            break;
                        }
                    }
                    if (!active) continue;
                    double prod = 1.0;
                    for (int s : part.singles) prod *= zeta(s - 1, j[static_cast<std::size_t>(s - 1)]);
                    term += sign * prod;
                }
            }
            total += c * term;
        }
        int l = 0;
        while (l < k) {
            auto& jl = j[static_cast<std::size_t>(l)];
            if (jl < p[static_cast<std::size_t>(l)]) {
                ++jl;
                break;
            }
            jl = 0;
            ++l;
        }
        if (l == k) break;
    }
    return total;
}

double hermite_closed_form(int k, double delta, double Delta) {
    if (k < 1 || k > 5) throw std::invalid_argument("hermite_closed_form: k must lie in 1..5");
    if (Delta < 0.0) throw std::invalid_argument("hermite_closed_form: Delta must be non-negative");
    double prev = 1.0;
    double cur = delta;
    double factorial = 1.0;
    for (int n = 1; n < k; ++n) {
        const double next = delta * cur - n * Delta * prev;
        prev = cur;
        cur = next;
        factorial *= n + 1;
    }
    return cur / factorial;
}

} // namespace flspde
