// Command-line front end: analyze / validate / synthesize / roundtrip /
// floppy / perturb over JSON network and response-spec files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elastonet/dynsynth.hpp"
#include "elastonet/io.hpp"
#include "elastonet/realizability.hpp"
#include "elastonet/reduce.hpp"
#include "elastonet/robust.hpp"
#include "elastonet/synth2d.hpp"

using namespace elastonet;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("cannot parse number '" + item + "'");
        }
    }
    return out;
}

std::vector<double> parse_sweep(const std::string& text) {
    double lo = 0, hi = 0;
    int count = 0;
    char c1 = 0, c2 = 0;
    std::stringstream ss(text);
    if (!(ss >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
        count < 2 || hi <= lo) {
        throw ParseError("--sweep expects min:max:count with count >= 2");
    }
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        out.push_back(lo + (hi - lo) * i / (count - 1));
    }
    return out;
}

uint64_t seed_or_env(uint64_t seed, bool seed_given) {
    if (seed_given) return seed;
    if (const char* env = std::getenv("ELASTONET_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ParseError("ELASTONET_SEED is not an integer");
        }
    }
    return 0;
}

void print_report(const ValidationReport& report) {
    for (const auto& c : report.conditions) {
        std::cout << (c.passed ? "pass" : "FAIL") << "  " << c.name
                  << "  residual=" << format_double(c.residual) << "\n";
    }
}

void write_csv(const std::string& path, int nd,
               const std::vector<std::pair<double, Eigen::MatrixXd>>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "omega";
    for (int r = 1; r <= nd; ++r) {
        for (int c = 1; c <= nd; ++c) out << ",w_" << r << "_" << c;
    }
    out << "\n";
    for (const auto& [omega, w] : rows) {
        out << format_double(omega);
        for (int r = 0; r < nd; ++r) {
            for (int c = 0; c < nd; ++c) out << "," << format_double(w(r, c));
        }
        out << "\n";
    }
}

int cmd_analyze(const std::string& file, const std::string& omega_list,
                const std::string& sweep, const std::string& csv) {
    const Network net = load_network(file);
    const ModalResponse modal = extract_modal(net);
    const int nd = static_cast<int>(modal.terminal_positions.size()) *
                   net.dimension();
    std::cout << "terminals: " << modal.terminal_positions.size()
              << "  dimension: " << net.dimension() << "\n";
    std::cout << "resonances: " << modal.terms.size() << "\n";
    for (const auto& t : modal.terms) {
        std::cout << "  omega_sq=" << format_double(t.omega_sq)
                  << "  residue_rank=" << numerical_rank(t.C) << "\n";
    }
    auto floppy = floppy_modes(net);
    std::cout << "floppy interior modes: " << floppy.count() << "\n";

    std::vector<double> omegas;
    if (!omega_list.empty()) omegas = parse_list(omega_list);
    if (!sweep.empty()) {
        auto extra = parse_sweep(sweep);
        omegas.insert(omegas.end(), extra.begin(), extra.end());
    }
    std::vector<std::pair<double, Eigen::MatrixXd>> rows;
    for (double omega : omegas) {
        try {
            rows.push_back({omega, dynamic_response_at(net, omega)});
        } catch (const ResonanceProximity&) {
            std::cout << "omega=" << format_double(omega)
                      << " is near a resonance; row skipped\n";
        }
    }
    if (!csv.empty()) {
        write_csv(csv, nd, rows);
        std::cout << "wrote " << rows.size() << " rows to " << csv << "\n";
    } else {
        for (const auto& [omega, w] : rows) {
            std::cout << "omega=" << format_double(omega)
                      << "  |W|=" << format_double(spectral_norm(w)) << "\n";
        }
    }
    return 0;
}

int cmd_validate(const std::string& file, double tol) {
    const ResponseSpec spec = load_response_spec(file);
    ValidationReport report;
    if (spec.static_response) {
        report = validate_static(*spec.static_response, tol);
    } else {
        report = validate_modal(*spec.modal_response, tol);
    }
    print_report(report);
    std::cout << (report.passed() ? "VALID" : "INVALID") << "\n";
    return report.passed() ? 0 : kExitValidation;
}

int cmd_synthesize(const std::string& file, const std::string& out,
                   double eps, uint64_t seed, double tol) {
    const ResponseSpec spec = load_response_spec(file);
    const auto& positions = spec.static_response
                                ? spec.static_response->terminal_positions
                                : spec.modal_response->terminal_positions;
    if (!positions.empty() && positions[0].size() != 2) {
        std::cerr << "synthesis is implemented for planar (d=2) targets only\n";
        return kExitValidation;
    }
    PlacementPolicy policy;
    policy.eps_hull = eps;
    policy.rng_seed = seed;
    (void)tol;
    SynthesisReport report =
        spec.static_response ? synth_static(*spec.static_response, policy)
                             : synth_dynamic(*spec.modal_response, policy);
    save_network(report.network, out);
    std::cout << "nodes: " << report.network.nodes().size()
              << "  springs: " << report.network.springs().size()
              << "  placed: " << report.placed_nodes.size() << "\n";
    std::cout << "eps_hull: " << format_double(eps)
              << "  crossings: " << network_crossings(report.network) << "\n";
    std::cout << "roundtrip_error: " << format_double(report.roundtrip_error)
              << "\n";
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_roundtrip(const std::string& file, double eps, uint64_t seed) {
    const Network net = load_network(file);
    const ModalResponse modal = extract_modal(net);
    auto report = validate_modal(modal);
    std::cout << "analysis: " << modal.terms.size() << " resonances, validation "
              << (report.passed() ? "passed" : "FAILED") << "\n";
    if (!report.passed()) {
        print_report(report);
        return kExitValidation;
    }
    if (net.dimension() != 2) {
        std::cout << "synthesis skipped: only planar networks are resynthesized\n";
        return 0;
    }
    PlacementPolicy policy;
    policy.eps_hull = eps;
    policy.rng_seed = seed;
    auto synth = synth_dynamic(modal, policy);
    std::cout << "resynthesized nodes: " << synth.network.nodes().size()
              << "  max relative error: "
              << format_double(synth.roundtrip_error) << "\n";
    return 0;
}

int cmd_floppy(const std::string& file, double fix_eps, const std::string& out,
               double eps_hull, uint64_t seed) {
    const Network net = load_network(file);
    auto modes = floppy_modes(net);
    if (modes.count() == 0) {
        std::cout << "no floppy modes\n";
    } else {
        std::cout << modes.count() << " floppy interior mode(s)\n";
    }
    if (fix_eps > 0.0) {
        PlacementPolicy policy;
        policy.eps_hull = eps_hull;
        policy.rng_seed = seed;
        auto report = eliminate_floppy(net, fix_eps, policy);
        std::cout << "fill stiffness: " << format_double(fix_eps)
                  << "  anchors: " << report.anchor_nodes.size()
                  << "  remaining modes: " << report.remaining_modes.count()
                  << "\n";
        std::cout << "response drift: " << format_double(report.residual_drift)
                  << "\n";
        if (!out.empty()) {
            save_network(report.fixed_network, out);
            std::cout << "wrote " << out << "\n";
        }
        if (report.remaining_modes.count() > 0) return kExitValidation;
    }
    return 0;
}

int cmd_perturb(const std::string& file, const std::string& eps_list,
                const std::string& omega_list) {
    const Network net = load_network(file);
    Perturbation pert;
    for (const auto& s : net.springs()) {
        pert.scaled_springs.push_back({s.a, s.b, s.stiffness});
    }
    std::vector<double> omegas =
        omega_list.empty() ? std::vector<double>{0.0} : parse_list(omega_list);
    auto report = stability_experiment(net, pert, parse_list(eps_list), omegas);
    for (size_t i = 0; i < report.eps.size(); ++i) {
        std::cout << "eps=" << format_double(report.eps[i])
                  << "  drift=" << format_double(report.drift[i]) << "\n";
    }
    if (report.slope) {
        std::cout << "slope: " << format_double(*report.slope)
                  << "  fit_residual: " << format_double(report.fit_residual)
                  << "\n";
    } else {
        std::cout << "slope: undefined (need at least two nonzero points)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spring-mass network response analysis and synthesis"};
    app.require_subcommand(1);

    std::string file, out, omega_list, sweep, csv, eps_list;
    double tol = kRelTol;
    double eps_hull = 0.5;
    double fix_eps = 0.0;
    uint64_t seed = 0;
    bool seed_given = false;

    auto* analyze = app.add_subcommand("analyze", "terminal response of a network");
    analyze->add_option("network", file, "network JSON file")->required();
    analyze->add_option("--omega", omega_list, "comma-separated frequencies");
    analyze->add_option("--sweep", sweep, "frequency sweep min:max:count");
    analyze->add_option("--csv", csv, "write response rows to a CSV file");

    auto* validate = app.add_subcommand("validate", "check a response spec");
    validate->add_option("spec", file, "response spec JSON file")->required();
    validate->add_option("--tol", tol, "relative tolerance");

    auto* synthesize =
        app.add_subcommand("synthesize", "build a network realizing a spec");
    synthesize->add_option("spec", file, "response spec JSON file")->required();
    synthesize->add_option("-o,--output", out, "output network file")->required();
    synthesize->add_option("--eps", eps_hull, "hull neighborhood radius");
    synthesize->add_option("--seed", seed, "placement RNG seed")
        ->each([&](const std::string&) { seed_given = true; });
    synthesize->add_option("--tol", tol, "relative tolerance");

    auto* roundtrip =
        app.add_subcommand("roundtrip", "analyze, resynthesize and compare");
    roundtrip->add_option("network", file, "network JSON file")->required();
    roundtrip->add_option("--eps", eps_hull, "hull neighborhood radius");
    roundtrip->add_option("--seed", seed, "placement RNG seed")
        ->each([&](const std::string&) { seed_given = true; });

    auto* floppy = app.add_subcommand("floppy", "floppy modes and elimination");
    floppy->add_option("network", file, "network JSON file")->required();
    floppy->add_option("--fix", fix_eps, "eliminate modes with this fill stiffness");
    floppy->add_option("-o,--output", out, "output file for the fixed network");
    floppy->add_option("--eps", eps_hull, "hull neighborhood radius for anchors");
    floppy->add_option("--seed", seed, "anchor placement seed")
        ->each([&](const std::string&) { seed_given = true; });

    auto* perturb = app.add_subcommand("perturb", "stiffness stability experiment");
    perturb->add_option("network", file, "network JSON file")->required();
    perturb->add_option("--eps", eps_list, "comma-separated epsilon values")
        ->required();
    perturb->add_option("--omega", omega_list, "comma-separated frequencies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    try {
        const uint64_t rng_seed = seed_or_env(seed, seed_given);
        if (analyze->parsed()) return cmd_analyze(file, omega_list, sweep, csv);
        if (validate->parsed()) return cmd_validate(file, tol);
        if (synthesize->parsed()) {
            return cmd_synthesize(file, out, eps_hull, rng_seed, tol);
        }
        if (roundtrip->parsed()) return cmd_roundtrip(file, eps_hull, rng_seed);
        if (floppy->parsed()) {
            return cmd_floppy(file, fix_eps, out, eps_hull, rng_seed);
        }
        if (perturb->parsed()) return cmd_perturb(file, eps_list, omega_list);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitUsage;
}
