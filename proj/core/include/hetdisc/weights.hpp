#pragma once

// Pareto-weight dynamics on the simplex and the discount sequences they induce.

#include <cstddef>
#include <span>
#include <vector>

namespace hetdisc {

// A point of the n-simplex: nonnegative entries summing to one.
class WeightVector {
public:
    // Validates entries >= 0 and |sum - 1| <= 1e-12. Throws std::invalid_argument.
    static WeightVector from(std::vector<double> theta);
    // Scales a nonnegative, not-all-zero vector onto the simplex.
    static WeightVector normalized(std::vector<double> theta);
    // Normalizes exp(logw); a finite log whose share ends below 1e-300 counts as clamped.
    static WeightVector from_logs(const std::vector<double>& logw);

    [[nodiscard]] std::size_t size() const { return theta_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return theta_[i]; }
    [[nodiscard]] std::span<const double> values() const { return theta_; }
    operator std::span<const double>() const { return theta_; }  // NOLINT(google-explicit-constructor)

    // True when some entry fell below 1e-300 during normalization and was set to 0.
    [[nodiscard]] bool underflow_clamped() const { return clamped_; }

    friend bool operator==(const WeightVector& a, const WeightVector& b) { return a.theta_ == b.theta_; }

private:
    WeightVector(std::vector<double> theta, bool clamped) : theta_(std::move(theta)), clamped_(clamped) {}

    std::vector<double> theta_;
    bool clamped_ = false;
};

// Individual discount factors 1 > d^1 >= ... >= d^n > 0 plus the curvature used
// for effective quantities. Ties are allowed so that the homogeneous case can
// be represented; heterogeneous() tells them apart.
class DiscountProfile {
public:
    static DiscountProfile make(std::vector<double> delta, double gamma);

    [[nodiscard]] std::size_t size() const { return delta_.size(); }
    [[nodiscard]] std::span<const double> delta() const { return delta_; }
    // (d^i)^(1/gamma)
    [[nodiscard]] std::span<const double> delta_hat() const { return delta_hat_; }
    [[nodiscard]] double gamma() const { return gamma_; }
    [[nodiscard]] bool heterogeneous() const { return delta_.front() != delta_.back(); }
    [[nodiscard]] double most_patient() const { return delta_.front(); }
    [[nodiscard]] double least_patient() const { return delta_.back(); }

private:
    DiscountProfile(std::vector<double> delta, std::vector<double> delta_hat, double gamma)
        : delta_(std::move(delta)), delta_hat_(std::move(delta_hat)), gamma_(gamma) {}

    std::vector<double> delta_;
    std::vector<double> delta_hat_;
    double gamma_;
};

struct DiscountSequence {
    std::vector<double> beta;      // beta_0..beta_T, beta_0 = 1
    std::vector<double> beta_hat;  // effective factors, beta_hat_0 = 1
    std::vector<double> mu;        // mu(theta_t), t = 0..T
    std::vector<double> mu_hat;    // mu_hat(theta_t), t = 0..T
};

// theta'^i = theta^i d^i / sum_j theta^j d^j. Throws on an all-zero vector.
WeightVector update_weights(std::span<const double> theta, const DiscountProfile& d);

// Closed form theta_t^i proportional to theta_0^i (d^i)^t, evaluated in log
// space so that t in the thousands does not underflow before normalization.
WeightVector weights_at(const WeightVector& theta0, const DiscountProfile& d, long t);

// Aggregate discount factor sum_i theta^i d^i for theta on the simplex.
double mu(std::span<const double> theta, const DiscountProfile& d);

// theta^(1/gamma), renormalized.
WeightVector effective_weights(std::span<const double> theta, double gamma);

// Weighted power mean [sum_i a^i(theta) (d^i)^(1/gamma)]^gamma.
double effective_mu(std::span<const double> theta, const DiscountProfile& d);

// d^1 - mu_hat(theta), evaluated without cancellation. Nonnegative.
double effective_mu_shortfall(std::span<const double> theta, const DiscountProfile& d);

// beta_t = sum_i theta_0^i (d^i)^t, beta_hat_t = (sum_i theta_hat_0^i (d_hat^i)^t)^gamma,
// with mu and mu_hat evaluated along theta_t. Requires T >= 1.
DiscountSequence discount_sequences(const WeightVector& theta0, const DiscountProfile& d, long T);

}  // namespace hetdisc
