#include <doctest.h>

#include "elastonet/reduce.hpp"
#include "testutil.hpp"

using namespace elastonet;
using namespace testutil;

TEST_CASE("static response of a chain is the series-spring formula") {
    for (auto [k1, k2] : {std::pair{1.0, 1.0}, {2.0, 3.0}, {0.5, 4.0}}) {
        auto w = static_response(series_chain(k1, k2));
        const double keff = k1 * k2 / (k1 + k2);
        Eigen::VectorXd f(4);
        f << -1, 0, 1, 0;
        Eigen::MatrixXd expected = keff * f * f.transpose();
        CHECK(spectral_norm(w.matrix - expected) <=
              1e-12 * std::max(1.0, spectral_norm(expected)));
    }
}

TEST_CASE("no interior nodes: static response is K itself") {
    auto net = random_network(3, 2, 4, 0);
    CHECK((static_response(net).matrix - assemble(net).K).norm() ==
          doctest::Approx(0.0));
}

TEST_CASE("dangling spring to a lone interior node contributes nothing") {
    Network net(2,
                {terminal("a", vec2(0, 0)), terminal("b", vec2(3, 0)),
                 interior("i", vec2(1, 1))},
                {{"a", "b", 2.0}, {"a", "i", 5.0}});
    Network bare(2, {terminal("a", vec2(0, 0)), terminal("b", vec2(3, 0))},
                 {{"a", "b", 2.0}});
    CHECK(spectral_norm(static_response(net).matrix - static_response(bare).matrix) <=
          1e-12);
}

TEST_CASE("floppy mode of the collinear chain is the perpendicular direction") {
    auto fm = floppy_modes(series_chain());
    REQUIRE(fm.count() == 1);
    Eigen::VectorXd mode = fm.basis.col(0);
    CHECK(std::abs(mode(0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(mode(1)) == doctest::Approx(1.0));
}

TEST_CASE("triangulated interior has no floppy modes") {
    Network net(2,
                {terminal("a", vec2(0, 0)), terminal("b", vec2(2, 0)),
                 terminal("c", vec2(1, 2)), interior("i", vec2(1, 0.7))},
                {{"a", "i", 1.0}, {"b", "i", 1.0}, {"c", "i", 1.0}});
    CHECK(floppy_modes(net).count() == 0);
}

TEST_CASE("disconnected interior node has d free translations") {
    Network net2(2,
                 {terminal("a", vec2(0, 0)), terminal("b", vec2(1, 0)),
                  interior("i", vec2(0.5, 1))},
                 {{"a", "b", 1.0}});
    CHECK(floppy_modes(net2).count() == 2);
    Network net3(3,
                 {terminal("a", vec3(0, 0, 0)), terminal("b", vec3(1, 0, 0)),
                  interior("i", vec3(0.5, 1, 0))},
                 {{"a", "b", 1.0}});
    CHECK(floppy_modes(net3).count() == 3);
}

TEST_CASE("floppy basis vectors decouple from the terminals") {
    for (uint64_t seed : {10u, 11u, 12u, 13u, 14u}) {
        auto net = random_network(seed, 2, 3, 4);
        auto fm = floppy_modes(net);
        if (fm.count() == 0) continue;
        auto sys = assemble(net);
        Partition part = make_partition(net);
        const int d = 2;
        Eigen::MatrixXd a_bi(part.B.size() * d, part.I.size() * d);
        for (size_t r = 0; r < part.B.size(); ++r) {
            for (size_t c = 0; c < part.I.size(); ++c) {
                a_bi.block(r * d, c * d, d, d) =
                    sys.K.block(part.B[r] * d, part.I[c] * d, d, d);
            }
        }
        CHECK(spectral_norm(a_bi * fm.basis) <=
              1e-9 * std::max(1.0, spectral_norm(a_bi)));
    }
}

TEST_CASE("dynamic response with no interior is K - omega^2 M") {
    auto net = random_network(42, 2, 3, 0);
    auto sys = assemble(net);
    const double om = 1.3;
    Eigen::MatrixXd expected =
        sys.K - om * om * Eigen::MatrixXd(sys.M_diag.asDiagonal());
    CHECK(spectral_norm(dynamic_response_at(net, om) - expected) <= 1e-12);
}

TEST_CASE("single-mass chain dynamic response matches the symbolic formula") {
    for (auto [k, m] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.7, 1.9}}) {
        auto net = single_mass_chain(k, m);
        for (double om2 : {0.3, 2.0, 5.0}) {
            const double expected = -k * m * om2 / (k - m * om2);
            auto w = dynamic_response_at(net, std::sqrt(om2));
            CHECK(w(0, 0) == doctest::Approx(expected).epsilon(1e-10));
            CHECK(w(1, 1) == doctest::Approx(0.0));
        }
    }
    // the k=1, m=1 spot value from the chain: omega^2 = 2 gives W_xx = 2
    CHECK(dynamic_response_at(single_mass_chain(), std::sqrt(2.0))(0, 0) ==
          doctest::Approx(2.0));
}

TEST_CASE("dynamic response at omega=0 equals the static response") {
    for (uint64_t seed : {1u, 2u, 3u, 4u}) {
        auto net = random_network(seed, seed % 2 ? 2 : 3, 3, 3);
        CHECK(spectral_norm(dynamic_response_at(net, 0.0) -
                            static_response(net).matrix) <=
              1e-10 * std::max(1.0, spectral_norm(static_response(net).matrix)));
    }
}

TEST_CASE("dynamic response near a resonance throws") {
    auto net = single_mass_chain();  // resonance at omega^2 = 1
    CHECK_THROWS_AS(dynamic_response_at(net, 1.0 + 1e-12), ResonanceProximity);
}

TEST_CASE("extract_modal of a static network has no terms") {
    auto net = random_network(7, 2, 3, 2, /*with_masses=*/false);
    auto modal = extract_modal(net);
    CHECK(modal.terms.empty());
    CHECK(spectral_norm(modal.static_part() - static_response(net).matrix) <= 1e-10);
}

TEST_CASE("extract_modal of the single-mass chain") {
    auto modal = extract_modal(single_mass_chain());
    REQUIRE(modal.terms.size() == 1);
    CHECK(modal.terms[0].omega_sq == doctest::Approx(1.0));
    CHECK(modal.terms[0].C(0, 0) == doctest::Approx(1.0));
    CHECK(modal.A(0, 0) == doctest::Approx(1.0));
    // W_xx(omega) = omega^2/(omega^2-1)
    CHECK(evaluate_modal(modal, std::sqrt(2.0))(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("identical decoupled chains cluster into one rank-2 residue") {
    Network net(2,
                {terminal("t0", vec2(0, 0)), terminal("t1", vec2(0, 3)),
                 interior("i0", vec2(1, 0), 1.0), interior("i1", vec2(1, 3), 1.0)},
                {{"t0", "i0", 1.0}, {"t1", "i1", 1.0}});
    auto modal = extract_modal(net);
    REQUIRE(modal.terms.size() == 1);
    CHECK(modal.terms[0].omega_sq == doctest::Approx(1.0));
    CHECK(numerical_rank(modal.terms[0].C) == 2);
}

TEST_CASE("modal form agrees with direct dynamic evaluation") {
    for (uint64_t seed : {21u, 22u, 23u, 24u, 25u, 26u}) {
        auto net = random_network(seed, seed % 2 ? 2 : 3, 3, 4);
        auto modal = extract_modal(net);
        auto spectrum = resonance_spectrum(net);
        for (double om : sample_frequencies(spectrum, 20, 0.05)) {
            Eigen::MatrixXd direct = dynamic_response_at(net, om);
            Eigen::MatrixXd via_modal = evaluate_modal(modal, om);
            CHECK(spectral_norm(direct - via_modal) <=
                  1e-8 * std::max(1.0, spectral_norm(direct)));
        }
        // W(0) of the modal form is the static response
        CHECK(spectral_norm(modal.static_part() - static_response(net).matrix) <=
              1e-8 * std::max(1.0, spectral_norm(static_response(net).matrix)));
    }
}

TEST_CASE("range containment R(A_IB) within R(A_II)") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        auto net = random_network(200 + seed, seed % 2 ? 2 : 3, 3, 4);
        const int d = net.dimension();
        auto sys = assemble(net);
        Partition part = make_partition(net);
        if (part.I.empty()) continue;
        Eigen::MatrixXd a_ii(part.I.size() * d, part.I.size() * d);
        Eigen::MatrixXd a_ib(part.I.size() * d, part.B.size() * d);
        for (size_t r = 0; r < part.I.size(); ++r) {
            for (size_t c = 0; c < part.I.size(); ++c)
                a_ii.block(r * d, c * d, d, d) =
                    sys.K.block(part.I[r] * d, part.I[c] * d, d, d);
            for (size_t c = 0; c < part.B.size(); ++c)
                a_ib.block(r * d, c * d, d, d) =
                    sys.K.block(part.I[r] * d, part.B[c] * d, d, d);
        }
        // projector onto range(A_II) via the pseudo-inverse
        Eigen::MatrixXd proj = a_ii * pseudo_inverse(a_ii);
        CHECK(spectral_norm(a_ib - proj * a_ib) <=
              1e-9 * std::max(1.0, spectral_norm(a_ib)));
    }
}

TEST_CASE("Schur complement minimizes the full quadratic form") {
    Rng rng(55);
    for (uint64_t seed = 0; seed < 5; ++seed) {
        auto net = random_network(300 + seed, 2, 3, 3);
        const int d = 2;
        auto sys = assemble(net);
        auto w = static_response(net);
        Partition part = make_partition(net);
        const int nb = static_cast<int>(part.B.size()) * d;
        const int ni = static_cast<int>(part.I.size()) * d;

        Eigen::MatrixXd a_ii(ni, ni), a_ib(ni, nb);
        for (size_t r = 0; r < part.I.size(); ++r) {
            for (size_t c = 0; c < part.I.size(); ++c)
                a_ii.block(r * d, c * d, d, d) =
                    sys.K.block(part.I[r] * d, part.I[c] * d, d, d);
            for (size_t c = 0; c < part.B.size(); ++c)
                a_ib.block(r * d, c * d, d, d) =
                    sys.K.block(part.I[r] * d, part.B[c] * d, d, d);
        }

        auto full_q = [&](const Eigen::VectorXd& ub, const Eigen::VectorXd& ui) {
            Eigen::VectorXd u(sys.K.rows());
            for (size_t i = 0; i < part.B.size(); ++i)
                u.segment(part.B[i] * d, d) = ub.segment(i * d, d);
            for (size_t i = 0; i < part.I.size(); ++i)
                u.segment(part.I[i] * d, d) = ui.segment(i * d, d);
            return quadratic_form(sys, u);
        };

        for (int rep = 0; rep < 20; ++rep) {
            Eigen::VectorXd ub = rng.point(nb, -1, 1);
            const double qw = ub.dot(w.matrix * ub);
            for (int rep2 = 0; rep2 < 5; ++rep2) {
                Eigen::VectorXd ui = rng.point(ni, -1, 1);
                CHECK(qw <= full_q(ub, ui) + 1e-9 * std::max(1.0, std::abs(qw)));
            }
            Eigen::VectorXd ui_star = -pseudo_inverse(a_ii) * a_ib * ub;
            CHECK(full_q(ub, ui_star) ==
                  doctest::Approx(qw).epsilon(1e-9).scale(std::max(1.0, qw)));
        }
    }
}

TEST_CASE("superposition: responses of interior-disjoint networks add") {
    Rng rng(66);
    for (uint64_t seed = 0; seed < 5; ++seed) {
        Rng local(400 + seed);
        auto pts = random_positions(local, 2, 3);
        auto make_nodes = [&](const std::string& prefix, int n_int) {
            std::vector<Node> nodes;
            for (int i = 0; i < 3; ++i)
                nodes.push_back(terminal("t" + std::to_string(i), pts[i]));
            for (int i = 0; i < n_int; ++i) {
                nodes.push_back(interior(prefix + std::to_string(i),
                                         local.point(2, 2.5, 4.0),
                                         local.uniform(0, 1) < 0.5
                                             ? local.uniform(0.3, 1.0)
                                             : 0.0));
            }
            return nodes;
        };
        auto nodes1 = make_nodes("p", 2);
        auto nodes2 = make_nodes("q", 2);
        auto link = [&](const std::vector<Node>& nodes) {
            std::vector<Spring> springs;
            for (size_t i = 0; i + 1 < nodes.size(); ++i)
                springs.push_back(
                    {nodes[i].label, nodes[i + 1].label, local.uniform(0.5, 2.0)});
            springs.push_back({nodes.front().label, nodes.back().label, 1.0});
            return springs;
        };
        auto s1 = link(nodes1);
        auto s2 = link(nodes2);
        Network n1(2, nodes1, s1);
        Network n2(2, nodes2, s2);
        std::vector<Node> merged_nodes = nodes1;
        merged_nodes.insert(merged_nodes.end(), nodes2.begin() + 3, nodes2.end());
        std::vector<Spring> merged_springs = s1;
        merged_springs.insert(merged_springs.end(), s2.begin(), s2.end());
        Network both(2, merged_nodes, merged_springs);

        auto spec1 = resonance_spectrum(n1);
        auto spec2 = resonance_spectrum(n2);
        Eigen::VectorXd spectrum(spec1.size() + spec2.size());
        spectrum << spec1, spec2;
        for (double om : sample_frequencies(spectrum, 10, 0.05)) {
            Eigen::MatrixXd sum =
                dynamic_response_at(n1, om) + dynamic_response_at(n2, om);
            Eigen::MatrixXd joint = dynamic_response_at(both, om);
            CHECK(spectral_norm(joint - sum) <=
                  1e-10 * std::max(1.0, spectral_norm(sum)));
        }
    }
}
