#include <doctest.h>

#include <cstdio>
#include <string>

#include "elastonet/io.hpp"
#include "elastonet/reduce.hpp"
#include "testutil.hpp"

using namespace elastonet;

TEST_CASE("shortest round-trip double formatting") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-2.25) == "-2.25");
    for (double v : {1.0 / 3.0, 1e-17, 3.141592653589793, 2.0 / 7.0, 1e300}) {
        CHECK(std::stod(format_double(v)) == v);
        CHECK(std::stod(format_double(-v)) == -v);
    }
}

TEST_CASE("network serialization is a byte-stable fixed point") {
    auto net = testutil::random_network(5, 2, 3, 4, /*with_masses=*/true);
    const std::string once = network_to_json(net);
    const Network parsed = network_from_json(once);
    const std::string twice = network_to_json(parsed);
    CHECK(once == twice);

    // the parsed network is physically identical
    REQUIRE(parsed.nodes().size() == net.nodes().size());
    REQUIRE(parsed.springs().size() == net.springs().size());
    CHECK(spectral_norm(static_response(parsed).matrix -
                        static_response(net).matrix) <= 1e-14);
}

TEST_CASE("serialization preserves 3D networks and masses exactly") {
    auto net = testutil::random_network(6, 3, 2, 3, /*with_masses=*/true);
    const Network parsed = network_from_json(network_to_json(net));
    CHECK(parsed.dimension() == 3);
    for (const auto& node : net.nodes()) {
        const auto& copy = parsed.nodes()[parsed.node_index(node.label)];
        CHECK(copy.mass == node.mass);
        CHECK(copy.position == node.position);
        CHECK(copy.kind == node.kind);
    }
}

TEST_CASE("network parse errors name the offending record") {
    CHECK_THROWS_AS(network_from_json("{ not json"), ParseError);
    CHECK_THROWS_AS(network_from_json("[1,2,3]"), ParseError);
    CHECK_THROWS_AS(network_from_json(R"({"dimension": 2, "nodes": [{}]})"),
                    ParseError);
    CHECK_THROWS_WITH_AS(
        network_from_json(
            R"({"dimension": 2, "nodes": [{"label": "a", "kind": "weird",
                "position": [0,0]}]})"),
        doctest::Contains("'a'"), ParseError);
    // structurally fine but physically invalid (coincident nodes)
    CHECK_THROWS_AS(network_from_json(R"({"dimension": 2, "nodes": [
        {"label": "a", "position": [0,0], "kind": "terminal"},
        {"label": "b", "position": [0,0], "kind": "terminal"}]})"),
                    ParseError);
}

TEST_CASE("static response specs round-trip") {
    testutil::Rng rng(9);
    auto pts = testutil::random_positions(rng, 2, 3);
    ResponseSpec spec;
    spec.static_response =
        StaticResponse{pts, testutil::random_static_target(rng, pts, 2)};
    const std::string text = response_spec_to_json(spec);
    const ResponseSpec parsed = response_spec_from_json(text);
    REQUIRE(parsed.static_response.has_value());
    CHECK_FALSE(parsed.modal_response.has_value());
    CHECK(parsed.static_response->matrix == spec.static_response->matrix);
    CHECK(response_spec_to_json(parsed) == text);
}

TEST_CASE("modal response specs round-trip") {
    auto net = testutil::random_network(15, 2, 3, 4, /*with_masses=*/true);
    ResponseSpec spec;
    spec.modal_response = extract_modal(net);
    const std::string text = response_spec_to_json(spec);
    const ResponseSpec parsed = response_spec_from_json(text);
    REQUIRE(parsed.modal_response.has_value());
    const auto& a = *spec.modal_response;
    const auto& b = *parsed.modal_response;
    REQUIRE(a.terms.size() == b.terms.size());
    CHECK(a.A == b.A);
    CHECK(a.terminal_masses == b.terminal_masses);
    for (size_t i = 0; i < a.terms.size(); ++i) {
        CHECK(a.terms[i].omega_sq == b.terms[i].omega_sq);
        CHECK(a.terms[i].C == b.terms[i].C);
    }
    CHECK(response_spec_to_json(parsed) == text);
}

TEST_CASE("response spec parse errors") {
    CHECK_THROWS_AS(response_spec_from_json("{}"), ParseError);
    CHECK_THROWS_AS(
        response_spec_from_json(R"({"terminal_positions": [[0,0]]})"),
        ParseError);
    CHECK_THROWS_AS(response_spec_from_json(
                        R"({"terminal_positions": [[0,0]],
                            "static_matrix": [[1,2],[3]]})"),
                    ParseError);
    CHECK_THROWS_AS(response_spec_from_json(
                        R"({"terminal_positions": [[0,0]],
                            "modal": {"A": [[0,0],[0,0]]}})"),
                    ParseError);
}

TEST_CASE("file save and load round-trip") {
    auto net = testutil::series_chain(1.0, 2.0);
    const std::string path = "io_test_network.json";
    save_network(net, path);
    const Network loaded = load_network(path);
    CHECK(network_to_json(loaded) == network_to_json(net));
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_network("does_not_exist.json"), ParseError);
}
