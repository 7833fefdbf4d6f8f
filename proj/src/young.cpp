#include "pbt/young.hpp"

#include <map>
#include <numeric>
#include <stdexcept>

namespace pbt {

namespace {

// Exact rational products are accumulated as prime exponent maps.
using Factored = std::map<int, int>;

void add_factor(Factored& f, long long v, int sign) {
    if (v <= 0) throw std::invalid_argument("non-positive factor");
    for (long long p = 2; p * p <= v; ++p) {
        while (v % p == 0) {
            f[static_cast<int>(p)] += sign;
            v /= p;
        }
    }
    if (v > 1) f[static_cast<int>(v)] += sign;
}

std::uint64_t expand(const Factored& f) {
    std::uint64_t out = 1;
    for (auto [p, e] : f) {
        if (e < 0) throw std::logic_error("non-integral dimension");
        for (int k = 0; k < e; ++k) {
            if (__builtin_mul_overflow(out, static_cast<std::uint64_t>(p), &out))
                throw std::overflow_error("dimension exceeds 64 bits");
        }
    }
    return out;
}

void enumerate_rec(int remaining, int max_part, int max_height, std::vector<int>& cur,
                   std::vector<Partition>& out) {
    if (remaining == 0) {
        out.emplace_back(cur);
        return;
    }
    if (static_cast<int>(cur.size()) == max_height) return;
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        cur.push_back(p);
        enumerate_rec(remaining - p, p, max_height, cur, out);
        cur.pop_back();
    }
}

}  // namespace

Partition::Partition(std::vector<int> r) : rows(std::move(r)) {
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] < 1) throw std::invalid_argument("partition rows must be positive");
        if (i > 0 && rows[i] > rows[i - 1])
            throw std::invalid_argument("partition rows must be weakly decreasing");
    }
}

int Partition::size() const { return std::accumulate(rows.begin(), rows.end(), 0); }

std::string Partition::str() const {
    std::string s = "(";
    for (size_t i = 0; i < rows.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(rows[i]);
    }
    return s + ")";
}

std::vector<Partition> enumerate_partitions(int n, int max_height) {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    if (max_height < 1) throw std::invalid_argument("max_height must be positive");
    std::vector<Partition> out;
    std::vector<int> cur;
    enumerate_rec(n, n, max_height, cur, out);
    return out;
}

std::uint64_t dim_specht(const Partition& lambda) {
    Factored f;
    for (int k = 2; k <= lambda.size(); ++k) add_factor(f, k, +1);
    for (int i = 0; i < lambda.height(); ++i) {
        for (int j = 0; j < lambda.rows[static_cast<size_t>(i)]; ++j) {
            int arm = lambda.rows[static_cast<size_t>(i)] - j - 1;
            int leg = 0;
            for (int k = i + 1; k < lambda.height() && lambda.rows[static_cast<size_t>(k)] > j; ++k)
                ++leg;
            add_factor(f, arm + leg + 1, -1);
        }
    }
    return expand(f);
}

std::uint64_t dim_weyl(const Partition& lambda, int d) {
    if (d < 1) throw std::invalid_argument("d must be positive");
    if (lambda.height() > d) return 0;
    Factored f;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            add_factor(f, lambda.row(i) - lambda.row(j) + j - i, +1);
            add_factor(f, j - i, -1);
        }
    }
    return expand(f);
}

BoxAddition add_box(const Partition& alpha, int d) {
    if (d < 1) throw std::invalid_argument("d must be positive");
    BoxAddition out;
    out.parent = alpha;
    for (int i = 0; i <= alpha.height(); ++i) {
        if (i > 0 && alpha.row(i) == alpha.row(i - 1)) continue;
        std::vector<int> rows = alpha.rows;
        if (i == alpha.height())
            rows.push_back(1);
        else
            ++rows[static_cast<size_t>(i)];
        Partition child(std::move(rows));
        if (child.height() <= d)
            out.children.push_back(std::move(child));
        else
            out.theta = std::move(child);
    }
    return out;
}

std::vector<Partition> remove_box(const Partition& nu) {
    if (nu.empty()) throw std::invalid_argument("cannot remove a box from the empty partition");
    std::vector<Partition> out;
    for (int i = 0; i < nu.height(); ++i) {
        if (nu.row(i) == nu.row(i + 1)) continue;
        std::vector<int> rows = nu.rows;
        if (--rows[static_cast<size_t>(i)] == 0) rows.pop_back();
        out.emplace_back(std::move(rows));
    }
    return out;
}

int added_row(const Partition& parent, const Partition& child) {
    if (child.size() != parent.size() + 1) throw std::invalid_argument("not a one-box addition");
    for (int i = 0; i < child.height(); ++i) {
        int diff = child.row(i) - parent.row(i);
        if (diff == 1) return i;
        if (diff != 0) break;
    }
    throw std::invalid_argument("not a one-box addition");
}

std::uint64_t dim_theta(const Partition& alpha, int d) {
    auto add = add_box(alpha, d);
    return add.theta ? dim_specht(*add.theta) : 0;
}

}  // namespace pbt
