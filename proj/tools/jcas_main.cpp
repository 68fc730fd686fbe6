#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jcas/bistatic.hpp"
#include "jcas/channel.hpp"
#include "jcas/info_measures.hpp"
#include "jcas/monte_carlo.hpp"
#include "jcas/region_solver.hpp"
#include "jcas/types.hpp"
#include "json.hpp"

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Common {
    std::string channel_path;
    std::string units = "nats";
    int threads = 0;  // 0 = take JCAS_THREADS, else 1
    bool dump_config = false;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--channel", c.channel_path, "channel spec JSON file")->required();
    sub->add_option("--units", c.units, "display units for stdout (CSV always carries nats)")
        ->check(CLI::IsMember({"nats", "bits"}));
    sub->add_option("--threads", c.threads,
                    "worker threads; falls back to JCAS_THREADS, then 1");
    sub->add_flag("--dump-config", c.dump_config,
                  "print the resolved config as JSON and exit without computing");
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("JCAS_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != nullptr && *end == '\0' && v >= 1 && v <= 1024)
            return static_cast<int>(v);
    }
    return 1;
}

jcas::Distribution parse_prob_list(const std::string& text, const std::string& what) {
    std::vector<double> probs;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            probs.push_back(std::stod(tok));
        } catch (...) {
            throw jcas::ValidationError(what + ": cannot parse '" + tok + "' as a probability");
        }
    }
    if (probs.empty()) throw jcas::ValidationError(what + " is empty");
    jcas::Distribution d(std::move(probs));
    d.validate(what);
    return d;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            values.push_back(std::stoi(tok));
        } catch (...) {
            throw jcas::ValidationError(what + ": cannot parse '" + tok + "' as an integer");
        }
    }
    if (values.empty()) throw jcas::ValidationError(what + " is empty");
    return values;
}

// Loads the channel and assembles the resolved-config echo that every
// command prints (no hidden defaults). Returns false when --dump-config asked
// for the config only.
struct Prologue {
    jcas::ChannelFamily family;
    std::string hash;
    std::map<std::string, std::string> config;
};

bool start_command(const std::string& name, const Common& c,
                   std::map<std::string, std::string> extra, Prologue& out) {
    out.family = jcas::load_channel_file(c.channel_path);
    out.hash = jcas::channel_content_hash(out.family);
    out.config = std::move(extra);
    out.config["command"] = name;
    out.config["channel"] = c.channel_path;
    out.config["channel_hash"] = out.hash;
    out.config["units"] = c.units;
    out.config["threads"] = std::to_string(resolve_threads(c.threads));
    if (c.dump_config) {
        nlohmann::json j(out.config);
        std::cout << j.dump(2) << "\n";
        return false;
    }
    std::cout << "command: " << name << "\n";
    std::cout << "channel_hash: " << out.hash << "\n";
    std::cout << "config:\n";
    for (const auto& [key, value] : out.config)
        if (key != "command" && key != "channel_hash")
            std::cout << "  " << key << ": " << value << "\n";
    return true;
}

// Nats value displayed per --units; key gets the matching suffix.
void print_value(const std::string& base, double nats, const std::string& units) {
    if (units == "bits")
        std::cout << base << "_bits: " << jcas::format_double(nats / kLn2) << "\n";
    else
        std::cout << base << "_nats: " << jcas::format_double(nats) << "\n";
}

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw jcas::ValidationError("cannot open output path " + path);
    os << text;
    if (!os) throw jcas::ValidationError("failed writing output path " + path);
}

void emit_curve(jcas::RegionCurve& curve, const std::string& hash, const std::string& path,
                const std::string& label, const std::string& units) {
    curve.metadata["channel_hash"] = hash;
    std::cout << label << "_points: " << curve.points.size() << "\n";
    if (!curve.points.empty()) {
        print_value(label + "_e_max", curve.points.back().e, units);
        print_value(label + "_r_max", curve.points.front().r, units);
    }
    if (!path.empty()) {
        write_text_file(jcas::region_csv_string(curve), path);
        std::cout << label << "_csv: " << path << "\n";
    }
}

void emit_sim_report(jcas::SimReport& report, const Prologue& pro, const Common& c,
                     const std::string& out_csv, const std::string& out_json) {
    report.config["channel"] = c.channel_path;
    report.config["channel_hash"] = pro.hash;
    for (const jcas::SimPoint& p : report.per_n) {
        std::cout << "pd[n=" << p.n << "]: " << jcas::format_double(p.pd) << " ("
                  << p.det_errors << "/" << p.trials << ", wilson "
                  << jcas::format_double(p.pd_lo) << ".." << jcas::format_double(p.pd_hi)
                  << ")\n";
        std::cout << "pc[n=" << p.n << "]: " << jcas::format_double(p.pc) << " ("
                  << p.comm_errors << "/" << p.trials << ")\n";
    }
    switch (report.fitted.status) {
        case jcas::ExponentFit::Status::ok:
            std::cout << "fitted_status: ok\n";
            print_value("fitted_exponent", report.fitted.value, c.units);
            std::cout << "fitted_stderr: " << jcas::format_double(report.fitted.stderr_)
                      << "\n";
            std::cout << "fitted_points_used: " << report.fitted.points_used << "\n";
            break;
        case jcas::ExponentFit::Status::infinite:
            std::cout << "fitted_status: infinite\n";
            std::cout << "fitted_exponent_nats: inf\n";
            break;
        default:
            std::cout << "fitted_status: insufficient\n";
            break;
    }
    if (!out_csv.empty()) {
        write_text_file(jcas::sim_report_csv(report), out_csv);
        std::cout << "csv: " << out_csv << "\n";
    }
    if (!out_json.empty()) {
        write_text_file(jcas::sim_report_json(report), out_json);
        std::cout << "json: " << out_json << "\n";
    }
}

// region-mono-open ----------------------------------------------------------

struct RegionOpenArgs {
    Common c;
    int resolution = 0;
    double tol = 1e-9;
    std::string out;
};

int run_region_mono_open(const RegionOpenArgs& a) {
    jcas::ChannelFamily probe = jcas::load_channel_file(a.c.channel_path);
    const int res = a.resolution > 0 ? a.resolution
                                     : jcas::default_grid_resolution(probe.x_size);
    Prologue pro;
    if (!start_command("region-mono-open", a.c,
                       {{"resolution", std::to_string(res)},
                        {"tol", jcas::format_double(a.tol)},
                        {"out", a.out}},
                       pro))
        return 0;
    jcas::RegionCurve curve =
        jcas::mono_open_region(pro.family, res, a.tol, resolve_threads(a.c.threads));
    emit_curve(curve, pro.hash, a.out, "region", a.c.units);
    return 0;
}

// region-mono-closed --------------------------------------------------------

struct RegionClosedArgs {
    Common c;
    int resolution = 0;
    double tol = 1e-9;
    int e_samples = 200;
    std::string out;
};

int run_region_mono_closed(const RegionClosedArgs& a) {
    jcas::ChannelFamily probe = jcas::load_channel_file(a.c.channel_path);
    const int res = a.resolution > 0 ? a.resolution
                                     : jcas::default_grid_resolution(probe.x_size);
    Prologue pro;
    if (!start_command("region-mono-closed", a.c,
                       {{"resolution", std::to_string(res)},
                        {"tol", jcas::format_double(a.tol)},
                        {"e_samples", std::to_string(a.e_samples)},
                        {"out", a.out}},
                       pro))
        return 0;
    jcas::RegionCurve curve = jcas::mono_closed_inner_region(pro.family, res, a.tol, a.e_samples,
                                                             resolve_threads(a.c.threads));
    emit_curve(curve, pro.hash, a.out, "region", a.c.units);
    return 0;
}

// region-bi ------------------------------------------------------------------

struct RegionBiArgs {
    Common c;
    int resolution = 0;
    int rate_samples = 20;
    int row_grid = 60;
    double refine_tol = 1e-9;
    std::string out_succ;
    std::string out_joint;
};

int run_region_bi(const RegionBiArgs& a) {
    jcas::ChannelFamily probe = jcas::load_channel_file(a.c.channel_path);
    const int res = a.resolution > 0 ? a.resolution
                                     : jcas::default_grid_resolution(probe.x_size);
    Prologue pro;
    if (!start_command("region-bi", a.c,
                       {{"resolution", std::to_string(res)},
                        {"rate_samples", std::to_string(a.rate_samples)},
                        {"row_grid", std::to_string(a.row_grid)},
                        {"refine_tol", jcas::format_double(a.refine_tol)},
                        {"out_succ", a.out_succ},
                        {"out_joint", a.out_joint}},
                       pro))
        return 0;
    auto [succ, joint] = jcas::bistatic_regions(pro.family, res, a.rate_samples, a.row_grid,
                                                a.refine_tol, resolve_threads(a.c.threads));
    emit_curve(succ, pro.hash, a.out_succ, "succ", a.c.units);
    emit_curve(joint, pro.hash, a.out_joint, "joint", a.c.units);
    return 0;
}

// exponent-phi ----------------------------------------------------------------

struct PhiArgs {
    Common c;
    std::string px;
    double tol = 1e-9;
};

int run_exponent_phi(const PhiArgs& a) {
    Prologue pro;
    if (!start_command("exponent-phi", a.c,
                       {{"px", a.px.empty() ? std::string("uniform") : a.px},
                        {"tol", jcas::format_double(a.tol)}},
                       pro))
        return 0;
    const jcas::Distribution p_x = a.px.empty()
                                       ? jcas::uniform_distribution(pro.family.x_size)
                                       : parse_prob_list(a.px, "--px");
    if (static_cast<int>(p_x.size()) != pro.family.x_size)
        throw jcas::ValidationError("--px size does not match |X|");
    const int S = pro.family.num_states();
    for (int s = 0; s < S; ++s)
        for (int sp = 0; sp < S; ++sp) {
            if (sp == s) continue;
            jcas::ChernoffResult cr = jcas::chernoff_pairwise(p_x, pro.family, s, sp, a.tol);
            std::cout << "chernoff[" << pro.family.states[s] << "->" << pro.family.states[sp]
                      << "]: " << jcas::format_double(cr.value)
                      << " (ell_star " << jcas::format_double(cr.ell_star) << ")\n";
        }
    for (int s = 0; s < S; ++s)
        print_value("psi[" + pro.family.states[s] + "]",
                    jcas::psi_s(p_x, pro.family, s, a.tol), a.c.units);
    print_value("phi", jcas::phi(p_x, pro.family, a.tol), a.c.units);
    return 0;
}

// exponent-rho ----------------------------------------------------------------

struct RhoArgs {
    Common c;
    std::string px;
    double rate = 0.0;
    int row_grid = 60;
    double refine_tol = 1e-9;
    std::string which = "all";
    std::string out;
};

int run_exponent_rho(const RhoArgs& a) {
    Prologue pro;
    if (!start_command("exponent-rho", a.c,
                       {{"px", a.px.empty() ? std::string("uniform") : a.px},
                        {"rate_nats", jcas::format_double(a.rate)},
                        {"row_grid", std::to_string(a.row_grid)},
                        {"refine_tol", jcas::format_double(a.refine_tol)},
                        {"which", a.which},
                        {"out", a.out}},
                       pro))
        return 0;
    jcas::ExponentQuery q;
    q.p_x = a.px.empty() ? jcas::uniform_distribution(pro.family.x_size)
                         : parse_prob_list(a.px, "--px");
    q.rate = a.rate;
    q.family = pro.family;
    q.grid = a.row_grid;
    q.refine_tol = a.refine_tol;
    if (a.which == "succ" || a.which == "all")
        print_value("rho_succ", jcas::rho_succ(q), a.c.units);
    if (a.which == "joint" || a.which == "all") {
        jcas::JointExponentBreakdown b = jcas::rho_joint(q);
        print_value("rho_joint", b.rho, a.c.units);
        if (!a.out.empty()) {
            write_text_file(jcas::breakdown_to_json(b, q), a.out);
            std::cout << "breakdown_json: " << a.out << "\n";
        }
    }
    if (a.which == "bound" || a.which == "all")
        print_value("corollary8_bound", jcas::rho_joint_lower_bound(q), a.c.units);
    return 0;
}

// simulate-mono ---------------------------------------------------------------

struct SimMonoArgs {
    Common c;
    std::string type;
    std::string n_list;
    std::int64_t trials = 0;
    std::uint64_t seed = 12345;
    std::string out;
    std::string json_out;
};

int run_simulate_mono(const SimMonoArgs& a) {
    Prologue pro;
    if (!start_command("simulate-mono", a.c,
                       {{"type", a.type.empty() ? std::string("uniform") : a.type},
                        {"n_list", a.n_list},
                        {"trials", std::to_string(a.trials)},
                        {"seed", std::to_string(a.seed)},
                        {"out", a.out},
                        {"json_out", a.json_out}},
                       pro))
        return 0;
    const jcas::Distribution type = a.type.empty()
                                        ? jcas::uniform_distribution(pro.family.x_size)
                                        : parse_prob_list(a.type, "--type");
    const std::vector<int> n_list = parse_int_list(a.n_list, "--n-list");
    jcas::SimReport report = jcas::simulate_mono_open(pro.family, type, n_list, a.trials,
                                                      a.seed, resolve_threads(a.c.threads));
    emit_sim_report(report, pro, a.c, a.out, a.json_out);
    if (report.fitted.status == jcas::ExponentFit::Status::insufficient) {
        std::cerr << "insufficient data: fewer than 3 block lengths reached 10 detection "
                     "errors; raise trials or extend n_list\n";
        return 4;
    }
    return 0;
}

// simulate-closed -------------------------------------------------------------

struct SimClosedArgs {
    Common c;
    double delta1 = 0.0;
    double delta2 = 0.0;
    std::string probe_type;
    std::string state_types;
    int n = 0;
    int m = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 12345;
    std::string out;
    std::string json_out;
};

int run_simulate_closed(const SimClosedArgs& a) {
    Prologue pro;
    if (!start_command("simulate-closed", a.c,
                       {{"delta1", jcas::format_double(a.delta1)},
                        {"delta2", jcas::format_double(a.delta2)},
                        {"probe_type", a.probe_type.empty() ? std::string("uniform") : a.probe_type},
                        {"state_types",
                         a.state_types.empty() ? std::string("uniform") : a.state_types},
                        {"n", std::to_string(a.n)},
                        {"M", std::to_string(a.m)},
                        {"trials", std::to_string(a.trials)},
                        {"seed", std::to_string(a.seed)},
                        {"out", a.out},
                        {"json_out", a.json_out}},
                       pro))
        return 0;
    const jcas::Distribution probe =
        a.probe_type.empty() ? jcas::uniform_distribution(pro.family.x_size)
                             : parse_prob_list(a.probe_type, "--probe-type");
    std::vector<jcas::Distribution> per_state;
    if (a.state_types.empty()) {
        per_state.assign(pro.family.num_states(),
                         jcas::uniform_distribution(pro.family.x_size));
    } else {
        std::stringstream ss(a.state_types);
        std::string tok;
        while (std::getline(ss, tok, ';'))
            per_state.push_back(parse_prob_list(tok, "--state-types"));
    }
    jcas::SimReport report =
        jcas::simulate_closed_loop(pro.family, a.delta1, a.delta2, probe, per_state, a.n, a.m,
                                   a.trials, a.seed, resolve_threads(a.c.threads));
    for (const char* key : {"n1", "n2", "n3", "implied_rate_nats"})
        std::cout << key << ": " << report.config[key] << "\n";
    emit_sim_report(report, pro, a.c, a.out, a.json_out);
    return 0;
}

// simulate-bi -----------------------------------------------------------------

struct SimBiArgs {
    Common c;
    std::string type;
    int n = 0;
    int m = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 12345;
    std::string mode = "joint";
    std::string out;
    std::string json_out;
};

int run_simulate_bi(const SimBiArgs& a) {
    Prologue pro;
    if (!start_command("simulate-bi", a.c,
                       {{"type", a.type.empty() ? std::string("uniform") : a.type},
                        {"n", std::to_string(a.n)},
                        {"M", std::to_string(a.m)},
                        {"trials", std::to_string(a.trials)},
                        {"seed", std::to_string(a.seed)},
                        {"mode", a.mode},
                        {"out", a.out},
                        {"json_out", a.json_out}},
                       pro))
        return 0;
    const jcas::Distribution type = a.type.empty()
                                        ? jcas::uniform_distribution(pro.family.x_size)
                                        : parse_prob_list(a.type, "--type");
    const jcas::BistaticMode mode = a.mode == "successive" ? jcas::BistaticMode::successive
                                                           : jcas::BistaticMode::joint;
    jcas::SimReport report = jcas::simulate_bistatic(pro.family, type, a.n, a.m, a.trials,
                                                     a.seed, mode, resolve_threads(a.c.threads));
    std::cout << "implied_rate_nats: " << report.config["implied_rate_nats"] << "\n";
    if (mode == jcas::BistaticMode::successive)
        std::cout << "first_stage_decoder: " << report.config["first_stage_decoder"] << "\n";
    emit_sim_report(report, pro, a.c, a.out, a.json_out);
    return 0;
}

// check-symmetry --------------------------------------------------------------

struct SymArgs {
    Common c;
    double tol = 1e-9;
};

int run_check_symmetry(const SymArgs& a) {
    Prologue pro;
    if (!start_command("check-symmetry", a.c, {{"tol", jcas::format_double(a.tol)}}, pro))
        return 0;
    jcas::SymmetryReport report = jcas::check_output_symmetry(pro.family, a.tol);
    std::cout << "symmetric: " << (report.symmetric ? "true" : "false") << "\n";
    if (report.symmetric) {
        std::cout << "base_input: " << *report.base_input << "\n";
        for (std::size_t x = 0; x < report.witness.size(); ++x) {
            std::cout << "witness[x=" << x << "]:";
            for (int z : report.witness[x]) std::cout << " " << z;
            std::cout << "\n";
        }
    }
    return 0;
}

// capacity --------------------------------------------------------------------

struct CapArgs {
    Common c;
    std::string which = "all";
    int resolution = 0;
    double tol = 1e-9;
};

std::string probs_string(const jcas::Distribution& d) {
    std::string out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) out += ",";
        out += jcas::format_double(d[i]);
    }
    return out;
}

int run_capacity(const CapArgs& a) {
    jcas::ChannelFamily probe = jcas::load_channel_file(a.c.channel_path);
    const int res = a.resolution > 0 ? a.resolution
                                     : jcas::default_grid_resolution(probe.x_size);
    Prologue pro;
    if (!start_command("capacity", a.c,
                       {{"which", a.which},
                        {"resolution", std::to_string(res)},
                        {"tol", jcas::format_double(a.tol)}},
                       pro))
        return 0;
    if (a.which == "per-state" || a.which == "all") {
        for (int s = 0; s < pro.family.num_states(); ++s) {
            jcas::CapacityResult cr = jcas::per_state_capacity(pro.family, s, a.tol);
            print_value("capacity[" + pro.family.states[s] + "]", cr.value, a.c.units);
            std::cout << "input[" << pro.family.states[s]
                      << "]: " << probs_string(cr.argmax_input) << "\n";
        }
    }
    if (a.which == "compound" || a.which == "all") {
        jcas::CapacityResult cr = jcas::compound_capacity(pro.family, res, a.tol);
        print_value("compound_capacity", cr.value, a.c.units);
        std::cout << "compound_input: " << probs_string(cr.argmax_input) << "\n";
    }
    if (a.which == "worst-case" || a.which == "all") {
        jcas::CapacityResult cr = jcas::worst_case_capacity(pro.family, a.tol);
        print_value("worst_case_capacity", cr.value, a.c.units);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rate / detection-error-exponent tradeoffs for joint communication and "
                 "sensing over state-dependent DMCs"};
    app.require_subcommand(1);

    RegionOpenArgs ro;
    CLI::App* s1 = app.add_subcommand("region-mono-open",
                                      "mono-static open-loop frontier");
    add_common(s1, ro.c);
    s1->add_option("--resolution", ro.resolution, "simplex grid resolution (0 = default)");
    s1->add_option("--tol", ro.tol, "Chernoff search tolerance");
    s1->add_option("--out", ro.out, "CSV output path");

    RegionClosedArgs rc;
    CLI::App* s2 = app.add_subcommand("region-mono-closed",
                                      "mono-static closed-loop inner bound");
    add_common(s2, rc.c);
    s2->add_option("--resolution", rc.resolution, "simplex grid resolution (0 = default)");
    s2->add_option("--tol", rc.tol, "Chernoff search tolerance");
    s2->add_option("--e-samples", rc.e_samples, "number of exponent sweep samples");
    s2->add_option("--out", rc.out, "CSV output path");

    RegionBiArgs rb;
    CLI::App* s3 = app.add_subcommand("region-bi",
                                      "bi-static successive and joint frontiers");
    add_common(s3, rb.c);
    s3->add_option("--resolution", rb.resolution, "input simplex resolution (0 = default)");
    s3->add_option("--rate-samples", rb.rate_samples, "rate sweep points per input");
    s3->add_option("--row-grid", rb.row_grid, "per-row grid for conditional-type searches");
    s3->add_option("--refine-tol", rb.refine_tol, "local refinement tolerance");
    s3->add_option("--out-succ", rb.out_succ, "CSV path for the successive frontier");
    s3->add_option("--out-joint", rb.out_joint, "CSV path for the joint frontier");

    PhiArgs ph;
    CLI::App* s4 = app.add_subcommand("exponent-phi",
                                      "worst-pair Chernoff sensing exponent phi(P_X)");
    add_common(s4, ph.c);
    s4->add_option("--px", ph.px, "input distribution, comma separated (default uniform)");
    s4->add_option("--tol", ph.tol, "golden-section tolerance");

    RhoArgs rh;
    CLI::App* s5 = app.add_subcommand("exponent-rho",
                                      "bi-static detection exponents at one (P_X, R)");
    add_common(s5, rh.c);
    s5->add_option("--px", rh.px, "input distribution, comma separated (default uniform)");
    s5->add_option("--rate", rh.rate, "rate R in nats")->required();
    s5->add_option("--row-grid", rh.row_grid, "per-row grid for conditional-type searches");
    s5->add_option("--refine-tol", rh.refine_tol, "local refinement tolerance");
    s5->add_option("--which", rh.which, "succ | joint | bound | all")
        ->check(CLI::IsMember({"succ", "joint", "bound", "all"}));
    s5->add_option("--out", rh.out, "JSON path for the rho_joint breakdown");

    SimMonoArgs sm;
    CLI::App* s6 = app.add_subcommand("simulate-mono",
                                      "Monte-Carlo mono-static open-loop detection");
    add_common(s6, sm.c);
    s6->add_option("--type", sm.type, "codeword type, comma separated (default uniform)");
    s6->add_option("--n-list", sm.n_list, "block lengths, comma separated")->required();
    s6->add_option("--trials", sm.trials, "trials per (n, state)")->required();
    s6->add_option("--seed", sm.seed, "master seed");
    s6->add_option("--out", sm.out, "CSV output path");
    s6->add_option("--json-out", sm.json_out, "JSON output path");

    SimClosedArgs sc;
    CLI::App* s7 = app.add_subcommand("simulate-closed",
                                      "Monte-Carlo three-phase closed-loop protocol");
    add_common(s7, sc.c);
    s7->add_option("--delta1", sc.delta1, "phase-1 fraction")->required();
    s7->add_option("--delta2", sc.delta2, "phase-2 fraction")->required();
    s7->add_option("--probe-type", sc.probe_type, "probe type (default uniform)");
    s7->add_option("--state-types", sc.state_types,
                   "per-state phase-3 types, ';' separated (default uniform)");
    s7->add_option("--n", sc.n, "total block length")->required();
    s7->add_option("--M", sc.m, "message count")->required();
    s7->add_option("--trials", sc.trials, "trials per state")->required();
    s7->add_option("--seed", sc.seed, "master seed");
    s7->add_option("--out", sc.out, "CSV output path");
    s7->add_option("--json-out", sc.json_out, "JSON output path");

    SimBiArgs sb;
    CLI::App* s8 = app.add_subcommand("simulate-bi",
                                      "Monte-Carlo bi-static joint / successive decoding");
    add_common(s8, sb.c);
    s8->add_option("--type", sb.type, "codeword type, comma separated (default uniform)");
    s8->add_option("--n", sb.n, "block length")->required();
    s8->add_option("--M", sb.m, "message count")->required();
    s8->add_option("--trials", sb.trials, "trials per state")->required();
    s8->add_option("--seed", sb.seed, "master seed");
    s8->add_option("--mode", sb.mode, "joint | successive")
        ->check(CLI::IsMember({"joint", "successive"}));
    s8->add_option("--out", sb.out, "CSV output path");
    s8->add_option("--json-out", sb.json_out, "JSON output path");

    SymArgs sy;
    CLI::App* s9 = app.add_subcommand("check-symmetry",
                                      "output-symmetry detector");
    add_common(s9, sy.c);
    s9->add_option("--tol", sy.tol, "matching tolerance");

    CapArgs ca;
    CLI::App* s10 = app.add_subcommand("capacity",
                                       "per-state, compound, and worst-case capacities");
    add_common(s10, ca.c);
    s10->add_option("--which", ca.which, "per-state | compound | worst-case | all")
        ->check(CLI::IsMember({"per-state", "compound", "worst-case", "all"}));
    s10->add_option("--resolution", ca.resolution, "compound grid seed resolution (0 = default)");
    s10->add_option("--tol", ca.tol, "convergence tolerance");

    int rc_code = 0;
    s1->callback([&] { rc_code = run_region_mono_open(ro); });
    s2->callback([&] { rc_code = run_region_mono_closed(rc); });
    s3->callback([&] { rc_code = run_region_bi(rb); });
    s4->callback([&] { rc_code = run_exponent_phi(ph); });
    s5->callback([&] { rc_code = run_exponent_rho(rh); });
    s6->callback([&] { rc_code = run_simulate_mono(sm); });
    s7->callback([&] { rc_code = run_simulate_closed(sc); });
    s8->callback([&] { rc_code = run_simulate_bi(sb); });
    s9->callback([&] { rc_code = run_check_symmetry(sy); });
    s10->callback([&] { rc_code = run_capacity(ca); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const jcas::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const jcas::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 3;
    } catch (const jcas::InsufficientDataError& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc_code;
}
