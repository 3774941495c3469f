#pragma once

#include <cmath>
#include <cstddef>

namespace herit {

// Kahan-Babuska compensated accumulator. The estimator ratios average m terms
// of mixed sign; compensation keeps them stable once m reaches 1e4 and costs
// nothing at small m.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <typename Range, typename Fn>
double sum_over(const Range& r, Fn f) {
    KahanSum s;
    const auto n = static_cast<std::ptrdiff_t>(r.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) s.add(f(r[i]));
    return s.value();
}

template <typename Range>
double sum_of(const Range& r) {
    return sum_over(r, [](double x) { return x; });
}

template <typename Range>
double mean_of(const Range& r) {
    return sum_of(r) / static_cast<double>(r.size());
}

}  // namespace herit
