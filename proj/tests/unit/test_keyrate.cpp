#include <doctest.h>

#include <cmath>

#include "qkdwdm/errors.hpp"
#include "qkdwdm/keyrate.hpp"
#include "qkdwdm/rng.hpp"

using namespace qkdwdm;

namespace {

// analytic Poissonian channel: the ground truth the decoy bounds must stay
// on the safe side of
struct TrueChannel {
    double eta;
    double y0;
    double e_opt;

    ChannelObservables observables(const DecoyProtocol& proto) const {
        ChannelObservables obs;
        auto [qm, em] = gain_and_qber(proto.mu, eta, y0, e_opt);
        auto [qn, en] = gain_and_qber(proto.nu, eta, y0, e_opt);
        obs.q_mu = qm;
        obs.e_mu = em;
        obs.q_nu = qn;
        obs.e_nu = en;
        obs.y0 = y0;
        obs.eta = eta;
        return obs;
    }
    double y1_true() const { return y0 + (1.0 - y0) * eta; }
    double e1_true() const {
        return (0.5 * y0 + e_opt * (1.0 - y0) * eta) / y1_true();
    }
};

} // namespace

TEST_SUITE_BEGIN("keyrate");

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == 1.0);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.11) == doctest::Approx(0.4999159581645280).epsilon(1e-12));
    CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
}

TEST_CASE("gain and QBER limits") {
    SUBCASE("noise-only channel is random") {
        auto [q, e] = gain_and_qber(0.6, 1e-300, 1e-5, 0.005);
        CHECK(q == doctest::Approx(1e-5).epsilon(1e-6));
        CHECK(e == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("clean channel has zero error") {
        auto [q, e] = gain_and_qber(0.6, 0.01, 0.0, 0.0);
        CHECK(e == 0.0);
        CHECK(q > 0.0);
    }
    SUBCASE("weak-flux series expansion") {
        const double eta = 1e-4;
        const double mu = 1.0;
        const double y0 = 1e-8;
        auto [q, e] = gain_and_qber(mu, eta, y0, 0.005);
        (void)e;
        CHECK(q == doctest::Approx(y0 + eta * mu).epsilon(1e-3));
    }
    SUBCASE("zero gain is a domain error") {
        CHECK_THROWS_AS(gain_and_qber(0.6, 0.0, 0.0, 0.0), std::domain_error);
    }
    SUBCASE("QBER stays within [e_opt-ish floor, 1/2]") {
        SplitMix rng(99);
        for (int i = 0; i < 500; ++i) {
            const double eta = std::pow(10.0, -6.0 + 6.0 * rng.next_double());
            const double y0 = std::pow(10.0, -9.0 + 6.0 * rng.next_double());
            const double e_opt = 0.05 * rng.next_double();
            auto [q, e] = gain_and_qber(0.6, eta, y0, e_opt);
            (void)q;
            CHECK(e <= 0.5 + 1e-12);
            CHECK(e >= std::min(e_opt, 0.5) - 1e-12);
        }
    }
}

TEST_CASE("decoy bounds are conservative on Poissonian channels") {
    DecoyProtocol proto;
    SplitMix rng(1234);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        TrueChannel ch{std::pow(10.0, -5.0 + 5.0 * rng.next_double()),
                       std::pow(10.0, -8.0 + 5.0 * rng.next_double()),
                       0.1 * rng.next_double()};
        const ChannelObservables obs = ch.observables(proto);
        const DecoyEstimate est = decoy_bounds(obs, proto);
        CHECK(est.y1_lower <= ch.y1_true() + 1e-15);
        if (est.ok) {
            CHECK(est.e1_upper >= ch.e1_true() - 1e-15);
            ++checked;
        }
    }
    CHECK(checked > 250); // the bound should actually engage almost everywhere
}

TEST_CASE("decoy bound edge cases") {
    DecoyProtocol proto;
    SUBCASE("nu >= mu is rejected") {
        proto.nu = proto.mu;
        ChannelObservables obs;
        obs.q_mu = obs.q_nu = 1e-3;
        CHECK_THROWS_AS(decoy_bounds(obs, proto), ConfigError);
        CHECK_THROWS_AS(proto.validate(), ConfigError);
    }
    SUBCASE("vacuum-like channel is insecure downstream") {
        // all intensities see only background: no single-photon evidence
        TrueChannel ch{1e-300, 1e-5, 0.0};
        const ChannelObservables obs = ch.observables(proto);
        QkdSystemSpec spec;
        const KeyRateReport report = secure_key_rate(obs, proto, spec);
        CHECK(report.y1_lower <= ch.y1_true() + 1e-15);
        CHECK_FALSE(report.secure);
        CHECK(report.r_bps == 0.0);
    }
}

TEST_CASE("fluctuation adjustment") {
    DecoyProtocol proto;
    QkdSystemSpec spec;
    TrueChannel ch{1e-3, 1.5e-5, 0.005};
    const ChannelObservables obs = ch.observables(proto);

    SUBCASE("the documented arithmetic example") {
        CHECK(adversarial_relative_shift(6.7e-4, 1e6, 5.0) ==
              doctest::Approx(5.0 / std::sqrt(670.0)).epsilon(1e-12));
        CHECK(adversarial_relative_shift(6.7e-4, 1e6, 5.0) ==
              doctest::Approx(0.193167).epsilon(1e-4));
    }
    SUBCASE("n_sigma 0 is the identity") {
        spec.n_sigma = 0.0;
        const ChannelObservables adj = fluctuation_adjust(obs, proto, spec);
        CHECK(adj.q_mu == obs.q_mu);
        CHECK(adj.q_nu == obs.q_nu);
        CHECK(adj.e_mu == obs.e_mu);
        CHECK(adj.e_nu == obs.e_nu);
        CHECK(adj.y0 == obs.y0);
    }
    SUBCASE("large blocks converge to the asymptotic values") {
        spec.block_size = 1e12;
        const ChannelObservables adj = fluctuation_adjust(obs, proto, spec);
        CHECK(adj.q_mu == doctest::Approx(obs.q_mu).epsilon(1e-3));
        CHECK(adj.q_nu == doctest::Approx(obs.q_nu).epsilon(1e-3));
        CHECK(adj.y0 == doctest::Approx(obs.y0).epsilon(1e-2));
    }
    SUBCASE("adjustment never increases the key rate") {
        SplitMix rng(777);
        for (int i = 0; i < 200; ++i) {
            TrueChannel c{std::pow(10.0, -4.0 + 3.0 * rng.next_double()),
                          std::pow(10.0, -7.0 + 3.0 * rng.next_double()),
                          0.02 * rng.next_double()};
            const ChannelObservables o = c.observables(proto);
            const KeyRateReport raw = secure_key_rate(o, proto, spec);
            const KeyRateReport adj =
                secure_key_rate(fluctuation_adjust(o, proto, spec), proto, spec);
            CHECK(adj.r_bps <= raw.r_bps + 1e-9);
        }
    }
    SUBCASE("directions: gains that hurt move the way that hurts") {
        const ChannelObservables adj = fluctuation_adjust(obs, proto, spec);
        CHECK(adj.q_mu >= obs.q_mu);
        CHECK(adj.q_nu <= obs.q_nu);
        CHECK(adj.e_mu >= obs.e_mu);
        CHECK(adj.e_nu >= obs.e_nu);
        CHECK(adj.y0 >= obs.y0);
        CHECK(adj.y0 <= adj.q_nu); // physical clamp
    }
}

TEST_CASE("secure key rate") {
    DecoyProtocol proto;
    QkdSystemSpec spec;

    SUBCASE("fully noisy channel never yields key") {
        TrueChannel ch{1e-300, 1e-4, 0.0}; // QBER 1/2
        const KeyRateReport report = secure_key_rate(ch.observables(proto), proto, spec);
        CHECK_FALSE(report.secure);
        CHECK(report.r_bps == 0.0);
        CHECK(report.r_per_pulse <= 0.0);
    }
    SUBCASE("clean lossy channel always yields key") {
        for (double eta : {1e-4, 1e-3, 1e-2, 1e-1}) {
            TrueChannel ch{eta, 0.0, 0.0};
            const KeyRateReport report = secure_key_rate(ch.observables(proto), proto, spec);
            CHECK(report.secure);
            CHECK(report.r_per_pulse > 0.0);
            CHECK(report.r_bps == doctest::Approx(report.r_per_pulse * spec.clock_hz));
        }
    }
    SUBCASE("monotone in background, misalignment and transmittance") {
        double prev = 1e300;
        for (double y0 = 1e-7; y0 < 1e-3; y0 *= 2.0) {
            TrueChannel ch{1e-3, y0, 0.005};
            const double r = secure_key_rate(ch.observables(proto), proto, spec).r_bps;
            CHECK(r <= prev + 1e-9);
            prev = r;
        }
        prev = 1e300;
        for (double e_opt = 0.0; e_opt < 0.06; e_opt += 0.005) {
            TrueChannel ch{1e-3, 1e-5, e_opt};
            const double r = secure_key_rate(ch.observables(proto), proto, spec).r_bps;
            CHECK(r <= prev + 1e-9);
            prev = r;
        }
        prev = -1.0;
        for (double eta = 1e-5; eta < 1e-1; eta *= 2.0) {
            TrueChannel ch{eta, 1e-5, 0.005};
            const double r = secure_key_rate(ch.observables(proto), proto, spec).r_bps;
            CHECK(r >= prev - 1e-9);
            prev = r;
        }
    }
}

TEST_SUITE_END();
