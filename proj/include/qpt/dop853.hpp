#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "qpt/errors.hpp"

namespace qpt {

struct IntegrateOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    std::int64_t max_steps = 4'000'000;
    double collision_floor = 1e-12;
};

struct IntegrateStats {
    std::int64_t steps = 0;     // accepted steps
    std::int64_t rejected = 0;  // rejected attempts
    double max_error = 0.0;     // largest accepted scaled error estimate (<= 1)
};

/// Explicit 8th-order Dormand-Prince scheme with embedded 5th/3rd order error
/// estimation (the classic 12-stage tableau). Adaptive step control with the
/// standard safety/clip constants. Supports stepwise use for event location
/// and whole-interval propagation via integrate_to().
template <int MaxN>
class Dop853 {
  public:
    void init(int n, double t0, const double* y0, const IntegrateOptions& opt) {
        n_ = n;
        t_ = t0;
        t_prev_ = t0;
        opt_ = opt;
        h_ = 0.0;
        stats_ = IntegrateStats{};
        for (int i = 0; i < n_; ++i) y_[i] = y0[i];
    }

    double t() const { return t_; }
    double t_prev() const { return t_prev_; }
    const double* y() const { return y_.data(); }
    const double* y_prev() const { return y_prev_.data(); }
    const IntegrateStats& stats() const { return stats_; }

    /// Advance by one accepted step toward t_end (never past it). Returns
    /// false when t_end has been reached.
    template <class Rhs>
    bool step(Rhs&& rhs, double t_end) {
        if (t_ == t_end) return false;
        const double dir = t_end > t_ ? 1.0 : -1.0;
        if (h_ == 0.0) h_ = initial_step(rhs, t_end);

        for (;;) {
            if (stats_.steps + stats_.rejected >= opt_.max_steps)
                throw StepSizeUnderflow("integration step budget exhausted");
            double h = std::min(h_, std::abs(t_end - t_));
            const bool clamped = h >= std::abs(t_end - t_);
            if (!clamped && h < 16.0 * eps_ * std::abs(t_))
                throw StepSizeUnderflow("step size underflow at t = " + std::to_string(t_));
            const double hs = dir * h;

            const double err = try_step(rhs, hs);
            if (err <= 1.0) {
                t_prev_ = t_;
                y_prev_ = y_;
                t_ = clamped ? t_end : t_ + hs;
                y_ = yw_;
                ++stats_.steps;
                stats_.max_error = std::max(stats_.max_error, err);
                double fac = err == 0.0 ? max_scale : safety * std::pow(err, -0.125);
                fac = std::clamp(fac, min_scale, max_scale);
                if (rejected_last_) fac = std::min(fac, 1.0);
                rejected_last_ = false;
                h_ = h * fac;
                return t_ != t_end;
            }
            ++stats_.rejected;
            rejected_last_ = true;
            h_ = h * std::max(safety * std::pow(err, -0.125), min_scale);
        }
    }

    template <class Rhs>
    void integrate_to(Rhs&& rhs, double t_end) {
        while (step(rhs, t_end)) {
        }
    }

  private:
    static constexpr double eps_ = 2.220446049250313e-16;
    static constexpr double safety = 0.9;
    static constexpr double min_scale = 1.0 / 3.0;
    static constexpr double max_scale = 6.0;

    template <class Rhs>
    double initial_step(Rhs&& rhs, double t_end) {
        rhs(t_, y_.data(), k_[0].data());
        double d0 = 0.0, d1 = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double sc = opt_.abs_tol + opt_.rel_tol * std::abs(y_[i]);
            d0 += (y_[i] / sc) * (y_[i] / sc);
            d1 += (k_[0][i] / sc) * (k_[0][i] / sc);
        }
        double h = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * std::sqrt(d0 / d1) : 1e-6;
        return std::min({h, std::abs(t_end - t_), 0.5});
    }

    // One trial step of signed size h from (t_, y_) into yw_; returns the
    // scaled error estimate.
    template <class Rhs>
    double try_step(Rhs&& rhs, double h) {
        auto& k1 = k_[0];
        auto& k2 = k_[1];
        auto& k3 = k_[2];
        auto& k4 = k_[3];
        auto& k5 = k_[4];
        auto& k6 = k_[5];
        auto& k7 = k_[6];
        auto& k8 = k_[7];
        auto& k9 = k_[8];
        auto& k10 = k_[9];
        auto& k11 = k_[10];
        auto& k12 = k_[11];
        auto& w = yw_;

        rhs(t_, y_.data(), k1.data());
        for (int i = 0; i < n_; ++i) w[i] = y_[i] + h * a21 * k1[i];
        rhs(t_ + c2 * h, w.data(), k2.data());
        for (int i = 0; i < n_; ++i) w[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t_ + c3 * h, w.data(), k3.data());
        for (int i = 0; i < n_; ++i) w[i] = y_[i] + h * (a41 * k1[i] + a43 * k3[i]);
        rhs(t_ + c4 * h, w.data(), k4.data());
        for (int i = 0; i < n_; ++i) w[i] = y_[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t_ + c5 * h, w.data(), k5.data());
        for (int i = 0; i < n_; ++i) w[i] = y_[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t_ + c6 * h, w.data(), k6.data());
        for (int i = 0; i < n_; ++i)
            w[i] = y_[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t_ + c7 * h, w.data(), k7.data());
        for (int i = 0; i < n_; ++i)
            w[i] = y_[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
        rhs(t_ + c8 * h, w.data(), k8.data());
        for (int i = 0; i < n_; ++i)
            w[i] = y_[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                                a97 * k7[i] + a98 * k8[i]);
        rhs(t_ + c9 * h, w.data(), k9.data());
        for (int i = 0; i < n_; ++i)
            w[i] = y_[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
        rhs(t_ + c10 * h, w.data(), k10.data());
        for (int i = 0; i < n_; ++i)
            w[i] = y_[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
        rhs(t_ + c11 * h, w.data(), k11.data());
        for (int i = 0; i < n_; ++i)
            w[i] = y_[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                                a1211 * k11[i]);
        rhs(t_ + h, w.data(), k12.data());

        double err5 = 0.0, err3 = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double slope = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                                 b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
            w[i] = y_[i] + h * slope;
            const double sc =
                opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(w[i]));
            const double e5 = e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] +
                              e59 * k9[i] + e510 * k10[i] + e511 * k11[i] + e512 * k12[i];
            const double e3 = slope - bh1 * k1[i] - bh2 * k9[i] - bh3 * k12[i];
            err5 += (e5 / sc) * (e5 / sc);
            err3 += (e3 / sc) * (e3 / sc);
        }
        const double deno = err5 + 0.01 * err3;
        if (deno <= 0.0) return 0.0;
        return std::abs(h) * err5 * std::sqrt(1.0 / (n_ * deno));
    }

    // Node coefficients
    static constexpr double c2 = 0.526001519587677318785587544488e-01;
    static constexpr double c3 = 0.789002279381515978178381316732e-01;
    static constexpr double c4 = 0.118350341907227396726757197510e+00;
    static constexpr double c5 = 0.281649658092772603273242802490e+00;
    static constexpr double c6 = 0.333333333333333333333333333333e+00;
    static constexpr double c7 = 0.25e+00;
    static constexpr double c8 = 0.307692307692307692307692307692e+00;
    static constexpr double c9 = 0.651282051282051282051282051282e+00;
    static constexpr double c10 = 0.6e+00;
    static constexpr double c11 = 0.857142857142857142857142857142e+00;

    // Runge-Kutta matrix
    static constexpr double a21 = 5.26001519587677318785587544488e-2;
    static constexpr double a31 = 1.97250569845378994544595329183e-2;
    static constexpr double a32 = 5.91751709536136983633785987549e-2;
    static constexpr double a41 = 2.95875854768068491816892993775e-2;
    static constexpr double a43 = 8.87627564304205475450678981324e-2;
    static constexpr double a51 = 2.41365134159266685502369798665e-1;
    static constexpr double a53 = -8.84549479328286085344864962717e-1;
    static constexpr double a54 = 9.24834003261792003115737966543e-1;
    static constexpr double a61 = 3.7037037037037037037037037037e-2;
    static constexpr double a64 = 1.70828608729473871279604482173e-1;
    static constexpr double a65 = 1.25467687566822425016691814123e-1;
    static constexpr double a71 = 3.7109375e-2;
    static constexpr double a74 = 1.70252211019544039314978060272e-1;
    static constexpr double a75 = 6.02165389804559606850219397283e-2;
    static constexpr double a76 = -1.7578125e-2;
    static constexpr double a81 = 3.70920001185047927108779319836e-2;
    static constexpr double a84 = 1.70383925712239993810214054705e-1;
    static constexpr double a85 = 1.07262030446373284651809199168e-1;
    static constexpr double a86 = -1.53194377486244017527936158236e-2;
    static constexpr double a87 = 8.27378916381402288758473766002e-3;
    static constexpr double a91 = 6.24110958716075717114429577812e-1;
    static constexpr double a94 = -3.36089262944694129406857109825e0;
    static constexpr double a95 = -8.68219346841726006818189891453e-1;
    static constexpr double a96 = 2.75920996994467083049415600797e1;
    static constexpr double a97 = 2.01540675504778934086186788979e1;
    static constexpr double a98 = -4.34898841810699588477366255144e1;
    static constexpr double a101 = 4.77662536438264365890433908527e-1;
    static constexpr double a104 = -2.48811461997166764192642586468e0;
    static constexpr double a105 = -5.90290826836842996371446475743e-1;
    static constexpr double a106 = 2.12300514481811942347288949897e1;
    static constexpr double a107 = 1.52792336328824235832596922938e1;
    static constexpr double a108 = -3.32882109689848629194453265587e1;
    static constexpr double a109 = -2.03312017085086261358222928593e-2;
    static constexpr double a111 = -9.3714243008598732571704021658e-1;
    static constexpr double a114 = 5.18637242884406370830023853209e0;
    static constexpr double a115 = 1.09143734899672957818500254654e0;
    static constexpr double a116 = -8.14978701074692612513997267357e0;
    static constexpr double a117 = -1.85200656599969598641566180701e1;
    static constexpr double a118 = 2.27394870993505042818970056734e1;
    static constexpr double a119 = 2.49360555267965238987089396762e0;
    static constexpr double a1110 = -3.0467644718982195003823669022e0;
    static constexpr double a121 = 2.27331014751653820792359768449e0;
    static constexpr double a124 = -1.05344954667372501984066689879e1;
    static constexpr double a125 = -2.00087205822486249909675718444e0;
    static constexpr double a126 = -1.79589318631187989172765950534e1;
    static constexpr double a127 = 2.79488845294199600508499808837e1;
    static constexpr double a128 = -2.85899827713502369474065508674e0;
    static constexpr double a129 = -8.87285693353062954433549289258e0;
    static constexpr double a1210 = 1.23605671757943030647266201528e1;
    static constexpr double a1211 = 6.43392746015763530355970484046e-1;

    // Weights
    static constexpr double b1 = 5.42937341165687622380535766363e-2;
    static constexpr double b6 = 4.45031289275240888144113950566e0;
    static constexpr double b7 = 1.89151789931450038304281599044e0;
    static constexpr double b8 = -5.8012039600105847814672114227e0;
    static constexpr double b9 = 3.1116436695781989440891606237e-1;
    static constexpr double b10 = -1.52160949662516078556178806805e-1;
    static constexpr double b11 = 2.01365400804030348374776537501e-1;
    static constexpr double b12 = 4.47106157277725905176885569043e-2;

    // 3rd-order error weights
    static constexpr double bh1 = 0.244094488188976377952755905512e+00;
    static constexpr double bh2 = 0.733846688281611857341361741547e+00;
    static constexpr double bh3 = 0.220588235294117647058823529412e-01;

    // 5th-order error weights
    static constexpr double e51 = 0.1312004499419488073250102996e-01;
    static constexpr double e56 = -0.1225156446376204440720569753e+01;
    static constexpr double e57 = -0.4957589496572501915214079952e+00;
    static constexpr double e58 = 0.1664377182454986536961530415e+01;
    static constexpr double e59 = -0.3503288487499736816886487290e+00;
    static constexpr double e510 = 0.3341791187130174790297318841e+00;
    static constexpr double e511 = 0.8192320648511571246570742613e-01;
    static constexpr double e512 = -0.2235530786388629525884427845e-01;

    int n_ = 0;
    double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0;
    bool rejected_last_ = false;
    IntegrateOptions opt_;
    IntegrateStats stats_;
    std::array<double, MaxN> y_{}, y_prev_{}, yw_{};
    std::array<std::array<double, MaxN>, 12> k_{};
};

}  // namespace qpt
