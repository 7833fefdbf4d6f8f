// Command-line front end: irreps, verify, fidelity, simulate, encode, export.
#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pbt/blockenc.hpp"
#include "pbt/checks.hpp"
#include "pbt/pbt.hpp"
#include "pbt/schur.hpp"
#include "pbt/simulate.hpp"
#include "pbt/store.hpp"
#include "pbt/twisted.hpp"
#include "pbt/young.hpp"

using namespace pbt;
using json = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "4", "2..6" or "2,3,5".
std::vector<int> parse_range(const std::string& text, int lo) {
    std::vector<int> out;
    auto number = [&](const std::string& s) {
        size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw UsageError("bad integer '" + s + "' in range '" + text + "'");
        }
        if (used != s.size()) throw UsageError("bad integer '" + s + "' in range '" + text + "'");
        if (v < lo) throw UsageError("value " + s + " below minimum " + std::to_string(lo));
        return v;
    };
    if (auto dots = text.find(".."); dots != std::string::npos) {
        const int a = number(text.substr(0, dots)), b = number(text.substr(dots + 2));
        if (b < a) throw UsageError("empty range '" + text + "'");
        for (int v = a; v <= b; ++v) out.push_back(v);
        return out;
    }
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(number(part));
    if (out.empty()) throw UsageError("empty range");
    return out;
}

std::ostream& csv(std::ostream& os) { return os << std::setprecision(17); }

std::string quote(const std::string& s) { return s.find(',') == std::string::npos ? s : "\"" + s + "\""; }

int cmd_irreps(int n, int d, const std::string& format) {
    if (n < 2) throw UsageError("irreps needs n >= 2");
    json rows = json::array();
    for (const auto& a : alpha_set(n, d)) {
        auto spec = gram_spectrum(n, d, a);  // throws when the closed form disagrees with the Gram matrix
        auto l = block_layout(n, d, a);
        json lam = json::object();
        for (const auto& s : l.nus) lam[s.nu.str()] = s.lambda;
        rows.push_back({{"alpha", a.str()},
                        {"d_alpha", dim_specht(a)},
                        {"m_alpha", dim_weyl(a, d)},
                        {"D_alpha", l.D},
                        {"lambda", lam},
                        {"gram_residual", spec.max_error}});
    }
    if (format == "json") {
        std::cout << json{{"n", n}, {"d", d}, {"irreps", rows}}.dump(2) << '\n';
        return kPass;
    }
    csv(std::cout) << "alpha,d_alpha,m_alpha,D_alpha,lambda,gram_residual\n";
    for (const auto& r : rows) {
        std::string lam;
        for (const auto& [nu, v] : r["lambda"].items()) {
            std::ostringstream os;
            csv(os) << nu << ':' << v.get<double>();
            lam += (lam.empty() ? "" : ";") + os.str();
        }
        std::cout << quote(r["alpha"].get<std::string>()) << ',' << r["d_alpha"] << ',' << r["m_alpha"] << ','
                  << r["D_alpha"] << ',' << quote(lam) << ',' << r["gram_residual"].get<double>() << '\n';
    }
    return kPass;
}

int cmd_verify(const std::string& suite, const std::vector<int>& ns, const std::vector<int>& ds, bool quiet) {
    SuiteReport rep;
    try {
        rep = run_suite(suite, ns, ds);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    csv(std::cout);
    if (!quiet) {
        std::cout << "suite,case,residual,tolerance,status\n";
        for (const auto& c : rep.cases)
            std::cout << suite << ',' << quote(c.label) << ',' << c.residual << ',' << c.tolerance << ','
                      << (c.pass ? "PASS" : "FAIL") << '\n';
    }
    std::cout << (rep.pass() ? "PASS" : "FAIL") << " suite=" << suite << " cases=" << rep.cases.size()
              << " max_residual=" << rep.max_residual() << " seconds=" << std::setprecision(3) << rep.seconds << '\n';
    if (!rep.pass()) std::cerr << "failing: " << rep.failures() << '\n';
    return rep.pass() ? kPass : kFail;
}

int cmd_fidelity(const std::vector<int>& ns, int d) {
    csv(std::cout) << "n,d,fidelity_dense,fidelity_twisted\n";
    bool ok = true;
    for (int n : ns) {
        if (n < 2) throw UsageError("fidelity needs n >= 2");
        const double dense = entanglement_fidelity(pgm_dense(n, d).povm).choi;
        auto tw = build_twisted(n, d);
        std::vector<Eigen::MatrixXcd> ks;
        for (int i = 0; i <= n - 2; ++i) ks.push_back(kraus_from_twisted(tw, i));
        const double twisted = entanglement_fidelity(povm_from_kraus(n, d, ks)).choi;
        ok = ok && std::abs(dense - twisted) <= 1e-8;
        std::cout << n << ',' << d << ',' << dense << ',' << twisted << '\n';
    }
    return ok ? kPass : kFail;
}

Eigen::MatrixXcd input_state(const std::string& kind, int d, std::uint64_t seed) {
    Eigen::MatrixXcd eta = Eigen::MatrixXcd::Zero(d, d);
    if (kind == "zero") {
        eta(0, 0) = 1.0;
    } else if (kind == "plus") {
        eta.setConstant(1.0 / d);
    } else if (kind == "mixed") {
        eta = Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d);
    } else if (kind == "random") {
        std::mt19937_64 rng(seed);
        Eigen::VectorXcd v = random_unitary(d, rng).col(0);
        eta = v * v.adjoint();
    } else {
        throw UsageError("unknown input '" + kind + "'");
    }
    return eta;
}

int cmd_simulate(int n, int d, const std::string& engine, const std::string& input, const std::string& variant,
                 long shots, std::uint64_t seed) {
    ProtocolRun spec;
    spec.n = n;
    spec.d = d;
    spec.seed = seed;
    spec.engine = engine == "amplified" ? Engine::Amplified : Engine::Dense;
    spec.variant = variant == "honest" ? ScaleVariant::Honest : ScaleVariant::Compressed;
    if (input != "entangled") spec.input = input_state(input, d, seed);
    RunReport rep;
    try {
        rep = run(spec);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    json out = json::parse(rep.json());
    out["input"] = input;
    if (spec.engine == Engine::Amplified) out["variant"] = variant;
    if (shots > 0) {
        auto h = sample(spec, shots);
        out["shots"] = shots;
        out["counts"] = h.counts;
        out["chi_square"] = h.chi_square;
        out["max_sigma"] = h.max_sigma;
    }
    std::cout << std::setprecision(17) << out.dump(2) << '\n';
    double total = 0.0;
    for (double p : rep.probabilities) total += p;
    return std::abs(total - 1.0) <= (spec.engine == Engine::Dense ? 1e-9 : 1e-4) ? kPass : kFail;
}

int cmd_encode(int n, int d, int port, const std::string& mode) {
    if (n < 3) throw UsageError("encode needs n >= 3");
    if (port < 1 || port > n - 1) throw UsageError("--i must lie in 1..n-1");
    KrausOptions opt;
    if (mode == "padded") {
        if (d & (d - 1)) throw UsageError("padded mode needs d to be a power of two");
        opt.padding = Padding::PowerOfTwo;
    }
    auto tw = build_twisted(n, d);
    auto rows = kraus_ledger(tw, port - 1, opt);
    json out{{"n", n}, {"d", d}, {"i", port}, {"mode", mode}};
    bool ok = true;
    for (const auto& r : rows) {
        ok = ok && r.ancilla_qubits == r.formula_qubits + r.guard_qubits;
        out["ledger"].push_back({{"encoding", r.encoding},
                                 {"scale", r.scale},
                                 {"ancilla_qubits", r.ancilla_qubits},
                                 {"formula_qubits", r.formula_qubits},
                                 {"guard_qubits", r.guard_qubits},
                                 {"error_bound", r.error_bound}});
    }
    auto be = encode_kraus(tw, port - 1, opt);
    auto pgm = pgm_dense(n, d);
    Eigen::MatrixXcd diff = be.scale * be.block() - psd_sqrt(pgm.povm.operators[static_cast<size_t>(port - 1)]);
    const double residual = Eigen::JacobiSVD<Eigen::MatrixXcd>(diff).singularValues()(0);
    out["kraus_residual"] = residual;
    out["residual_bound"] = be.error_bound;
    ok = ok && be.residual() <= be.error_bound;
    std::cout << std::setprecision(17) << out.dump(2) << '\n';
    return ok ? kPass : kFail;
}

int cmd_export(const std::string& object, int n, int d, int port, const std::filesystem::path& path) {
    auto cache = Cache::from_env();
    MatrixFile f;
    f.version = kConstructionVersion;
    if (object == "schur") {
        f.data = cache.get_or_build({"schur", n, d, ""}, [&] { return build_schur(n, d).U; });
        for (const auto& l : build_schur(n, d).index)
            f.row_labels.push_back(l.lambda.str() + ";r=" + std::to_string(l.r) + ";path=" + std::to_string(l.path));
    } else if (object == "twisted" || object == "kraus") {
        if (n < 2) throw UsageError(object + " needs n >= 2");
        auto tw = build_twisted(n, d);
        if (object == "kraus") {
            if (port < 1 || port > n - 1) throw UsageError("--i must lie in 1..n-1");
            f.data = kraus_from_twisted(tw, port - 1);
        } else {
            Eigen::Index rows = 0;
            for (const auto& b : tw.blocks) rows += b.f.cols();
            f.data.resize(rows, tw.hm_projector.cols());
            rows = 0;
            for (const auto& b : tw.blocks) {
                f.data.middleRows(rows, b.f.cols()) = b.f.adjoint();
                rows += b.f.cols();
                for (const auto& l : b.layout.labels)
                    f.row_labels.push_back(b.layout.alpha.str() + ";r=" + std::to_string(b.r) + ";" + l.nu.str() + ";" +
                                           l.xi.str() + ";j=" + std::to_string(l.j));
            }
        }
    } else {
        throw UsageError("unknown object '" + object + "'; objects: schur, twisted, kraus");
    }
    f.description = object + " n=" + std::to_string(n) + " d=" + std::to_string(d);
    save_matrix(path, f);
    auto back = load_matrix(path);
    const bool exact = back.data.rows() == f.data.rows() && back.data.cols() == f.data.cols() &&
                       std::memcmp(back.data.data(), f.data.data(), sizeof(cd) * f.data.size()) == 0;
    std::cout << path.string() << ": " << f.data.rows() << "x" << f.data.cols()
              << (exact ? " round-trip bit-exact" : " round-trip MISMATCH") << '\n';
    return exact ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Port-based teleportation toolkit: twisted Schur transforms, PGM, block-encodings"};
    app.require_subcommand(1);
    const auto positive = CLI::PositiveNumber;

    int n = 3, d = 2, port = 1;
    std::string n_range = "3", d_range = "2", format = "csv", suite, engine = "dense", input = "zero",
                variant = "compressed", mode = "padded", object;
    long shots = 0;
    std::uint64_t seed = 0;
    bool quiet = false;
    std::filesystem::path path;

    auto* irreps = app.add_subcommand("irreps", "Irrep table with Gram eigenvalues");
    irreps->add_option("--n", n, "Number of qudits n (ports n-1)")->required()->check(positive);
    irreps->add_option("--d", d, "Local dimension")->required()->check(positive);
    irreps->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("--suite", suite, "Suite name")->required();
    verify->add_option("--n", n_range, "n values: 4, 2..6 or 2,3");
    verify->add_option("--d", d_range, "d values: 2, 2..3 or 2,3");
    verify->add_flag("--quiet", quiet, "Only print the summary line");

    auto* fid = app.add_subcommand("fidelity", "Entanglement fidelity table");
    fid->add_option("--n", n_range, "n values")->required();
    fid->add_option("--d", d, "Local dimension")->required()->check(positive);

    auto* sim = app.add_subcommand("simulate", "Run the protocol and report outcome statistics");
    sim->add_option("--n", n, "Number of qudits")->check(positive);
    sim->add_option("--d", d, "Local dimension")->check(positive);
    sim->add_option("--engine", engine, "dense or amplified")->check(CLI::IsMember({"dense", "amplified"}));
    sim->add_option("--input", input, "zero, plus, mixed, random or entangled")
        ->check(CLI::IsMember({"zero", "plus", "mixed", "random", "entangled"}));
    sim->add_option("--variant", variant, "Amplified scale: honest or compressed")
        ->check(CLI::IsMember({"honest", "compressed"}));
    sim->add_option("--shots", shots, "Sampled shots (0 disables sampling)")->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", seed, "Seed for sampling and random inputs");

    auto* enc = app.add_subcommand("encode", "Block-encoding ledger for port i");
    enc->add_option("--n", n, "Number of qudits")->required()->check(positive);
    enc->add_option("--d", d, "Local dimension")->required()->check(positive);
    enc->add_option("--i", port, "Port, 1-based")->required();
    enc->add_option("--mode", mode, "padded or tight")->check(CLI::IsMember({"padded", "tight"}));

    auto* exp = app.add_subcommand("export", "Write a matrix file with JSON sidecar");
    exp->add_option("object", object, "schur, twisted or kraus")->required();
    exp->add_option("path", path, "Output path")->required();
    exp->add_option("--n", n, "Number of qudits (schur: tensor factors)")->required()->check(positive);
    exp->add_option("--d", d, "Local dimension")->required()->check(positive);
    exp->add_option("--i", port, "Port for kraus, 1-based");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (d < 2 && !(*fid) && !(*verify)) throw UsageError("d must be at least 2");
        if (*irreps) return cmd_irreps(n, d, format);
        if (*verify) return cmd_verify(suite, parse_range(n_range, 2), parse_range(d_range, 1), quiet);
        if (*fid) {
            if (d < 2) throw UsageError("d must be at least 2");
            return cmd_fidelity(parse_range(n_range, 2), d);
        }
        if (*sim) return cmd_simulate(n, d, engine, input, variant, shots, seed);
        if (*enc) return cmd_encode(n, d, port, mode);
        if (*exp) return cmd_export(object, n, d, port, path);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}
