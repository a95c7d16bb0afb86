#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tfe/asymptotics.hpp"
#include "tfe/config.hpp"
#include "tfe/errors.hpp"
#include "tfe/harness.hpp"
#include "tfe/selfsimilar.hpp"
#include "tfe/transient.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace tfe;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) fail(ErrorKind::IoError, "cannot read " + p.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    if (!os) fail(ErrorKind::IoError, "cannot write " + p.string());
    os << text;
    if (!os) fail(ErrorKind::IoError, "write to " + p.string() + " failed");
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + dir + ": " + ec.message());
    return fs::path(dir);
}

Json config_json(const RunConfig& c) { return Json::parse(serialize_config(c)); }

void write_meta(const fs::path& dir, const RunConfig& c, Json summary) {
    Json meta;
    meta["config"] = config_json(c);
    meta["summary"] = std::move(summary);
    write_file(dir / "meta.json", meta.dump(2) + "\n");
}

Grid1D output_grid(const RunConfig& c) { return Grid1D::graded(0.0, 1.0, c.grid_cells, 0.99); }

int cmd_selfsimilar(const RunConfig& c) {
    ShootingConfig sc;
    sc.grid_cells = static_cast<int>(c.grid_cells);
    const SelfSimilarSolution sol = solve(c.params, sc);
    const fs::path dir = prepare_dir(c.output_dir);
    std::ostringstream csv;
    csv << "x,H,dH,d2H\n";
    for (std::size_t i = 0; i < sol.profile.size(); ++i) {
        csv << num(sol.profile.grid()[i]) << ',' << num(sol.profile[i]) << ',' << num(sol.slope[i]) << ','
            << num(sol.curvature[i]) << '\n';
    }
    write_file(dir / "profile.csv", csv.str());
    Json s;
    s["B"] = sol.B;
    s["D"] = sol.D;
    s["n"] = sol.n;
    s["alpha"] = sol.alpha;
    s["gamma"] = sol.gamma;
    s["spreading_coefficient"] = sol.s_law.coefficient;
    s["residuals"] = {{"mass", sol.residuals.mass_defect},
                      {"slope", sol.residuals.slope_defect},
                      {"symmetry", sol.residuals.symmetry_defect}};
    write_meta(dir, c, s);
    return 0;
}

int cmd_asymptotics(const RunConfig& c) {
    const AsymptoticPrediction p = predict(c.params, output_grid(c));
    const fs::path dir = prepare_dir(c.output_dir);
    std::ostringstream csv;
    csv << "x,H0" << (p.H1 ? ",H1" : "") << '\n';
    for (std::size_t i = 0; i < p.H0.size(); ++i) {
        const double x = p.H0.grid()[i];
        csv << num(x) << ',' << num(p.H0[i]);
        if (p.H1) csv << ',' << num((*p.H1)(x));
        csv << '\n';
    }
    write_file(dir / "profile.csv", csv.str());
    Json s;
    s["regime"] = to_string(p.regime);
    s["gamma"] = p.gamma;
    s["s0_prefactor"] = p.s0_prefactor;
    s["beta"] = opt(p.beta);
    s["C1"] = opt(p.C1);
    s["C2"] = opt(p.C2);
    s["B0"] = opt(p.B0);
    s["omega"] = {{"coefficient", p.omega.coefficient}, {"exponent", p.omega.exponent}};
    s["s1_order"] = {{"t_power", p.s1_order.t_power}, {"log_t", p.s1_order.log_t}};
    if (p.inner) {
        s["inner"] = {{"a_in", p.inner->a_in}, {"b_in", p.inner->b_in}, {"c_in", p.inner->c_in},
                      {"xi_max", p.inner->xi_max}};
    }
    write_meta(dir, c, s);
    return 0;
}

TransientState load_initial(const RunConfig& c) {
    if (!c.initial_datum.file) return initial_state(c.initial_datum.preset, c.step, c.params.mass);
    std::istringstream is(read_file(*c.initial_datum.file));
    std::vector<double> y, h;
    std::string line;
    int row = 0;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty() || line[0] == '#' || (row == 1 && !std::isdigit(static_cast<unsigned char>(line[0])) &&
                                               line[0] != '-' && line[0] != '+' && line[0] != '.')) {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double a = 0.0, b = 0.0;
        if (!(ls >> a >> b)) {
            fail(ErrorKind::ParseError, *c.initial_datum.file + ": line " + std::to_string(row) + " is not 'y,h'");
        }
        y.push_back(a);
        h.push_back(b);
    }
    return initial_state(y, h, c.step);
}

struct TransientOutput {
    RunResult run;
    Json summary;
};

TransientOutput run_transient(const RunConfig& c) {
    TransientOutput out;
    out.run = run(load_initial(c), c.params, c.step, c.t_end, c.output_times);
    const auto& r = out.run;
    Json& s = out.summary;
    s["accepted_steps"] = r.accepted;
    s["rejected_steps"] = r.rejected;
    s["energy_violations"] = r.energy_violations;
    s["max_mass_step_drift"] = r.max_mass_step_drift;
    s["max_symmetry_defect"] = r.max_symmetry_defect;
    s["max_residual"] = r.max_residual;
    s["final_s_minus"] = r.final_state.s_minus;
    s["final_s_plus"] = r.final_state.s_plus;
    std::vector<double> t, w;
    for (const auto& rec : r.series) {
        if (!(rec.t > 0.0) || (!t.empty() && rec.t <= t.back())) continue;
        t.push_back(rec.t);
        w.push_back(0.5 * (rec.s_plus - rec.s_minus));
    }
    try {
        const ExponentFit f = fit_spreading_exponent(t, w);
        s["gamma_fit"] = f.gamma_hat;
        s["prefactor_fit"] = f.prefactor_hat;
        s["fit_window"] = {f.window.t_lo, f.window.t_hi};
    } catch (const Error& e) {
        s["gamma_fit"] = nullptr;
        s["gamma_fit_note"] = e.what();
    }
    return out;
}

int cmd_transient(const RunConfig& c) {
    const fs::path dir = prepare_dir(c.output_dir);
    const TransientOutput o = run_transient(c);
    std::ostringstream series;
    series << "t,s_minus,s_plus,mass,energy\n";
    for (const auto& rec : o.run.series) {
        series << num(rec.t) << ',' << num(rec.s_minus) << ',' << num(rec.s_plus) << ',' << num(rec.mass) << ','
               << num(rec.energy) << '\n';
    }
    write_file(dir / "series.csv", series.str());
    std::ostringstream snaps;
    snaps << "t,y,h\n";
    for (const auto& sn : o.run.snapshots) {
        const auto y = sn.state.physical_nodes();
        for (std::size_t i = 0; i < y.size(); ++i) {
            snaps << num(sn.t) << ',' << num(y[i]) << ',' << num(sn.state.heights[i]) << '\n';
        }
    }
    write_file(dir / "snapshots.csv", snaps.str());
    write_meta(dir, c, o.summary);
    return 0;
}

int cmd_figure(const RunConfig& c) {
    FigureOptions fo;
    fo.step = c.step;
    fo.t_end = c.figure_t_end;
    std::vector<std::future<FigureArtifacts>> jobs;
    for (const auto& tag : c.figures) {
        const FigureTag ft = parse_figure_tag(tag);
        jobs.push_back(std::async(std::launch::async, [ft, &c, fo] { return reproduce_figure(ft, c.output_dir, fo); }));
    }
    for (auto& j : jobs) j.get();
    return 0;
}

int cmd_sweep(const RunConfig& c) {
    struct Item {
        double n, alpha;
    };
    std::vector<Item> items;
    for (double n : c.sweep.n) {
        for (double a : c.sweep.alpha) items.push_back({n, a});
    }
    const fs::path dir = prepare_dir(c.output_dir);
    std::vector<Json> results(items.size());
    std::vector<std::string> errors(items.size());
    std::atomic<std::size_t> next{0};
    std::size_t workers = c.sweep.workers ? c.sweep.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, items.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            RunConfig rc = c;
            rc.command = Command::Transient;
            rc.params.n = items[i].n;
            rc.params.alpha = items[i].alpha;
            try {
                results[i] = run_transient(rc).summary;
            } catch (const Error& e) {
                errors[i] = std::string(to_string(e.kind())) + ": " + e.what();
            }
        }
    };
    std::vector<std::future<void>> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();

    std::ostringstream csv;
    csv << "n,alpha,regime,gamma_expected,gamma_fit,final_s_plus,status\n";
    Json runs = Json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
        ProblemParams p = c.params;
        p.n = items[i].n;
        p.alpha = items[i].alpha;
        const double expected = p.regime() == Regime::Strong ? p.alpha / (p.alpha + 4.0) : 1.0 / (p.n + 4.0);
        const auto& r = results[i];
        const bool ok = errors[i].empty();
        const bool fitted = ok && r.contains("gamma_fit") && r["gamma_fit"].is_number();
        csv << num(p.n) << ',' << num(p.alpha) << ',' << to_string(p.regime()) << ',' << num(expected) << ','
            << (fitted ? num(r["gamma_fit"].get<double>()) : "nan") << ','
            << (ok ? num(r["final_s_plus"].get<double>()) : "nan") << ',' << (ok ? "ok" : "failed") << '\n';
        Json j = ok ? r : Json{{"error", errors[i]}};
        j["n"] = p.n;
        j["alpha"] = p.alpha;
        runs.push_back(std::move(j));
    }
    write_file(dir / "sweep.csv", csv.str());
    write_meta(dir, c, {{"runs", runs}});
    const auto failed = std::count_if(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); });
    if (failed > 0) {
        const auto first = *std::find_if(errors.begin(), errors.end(), [](const std::string& e) { return !e.empty(); });
        fail(ErrorKind::NoConvergence, "sweep: " + std::to_string(failed) + " run(s) failed, first: " + first);
    }
    return 0;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError:
            return 1;
        case ErrorKind::IoError:
            return 3;
        default:
            return 2;
    }
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thin-film spreading with contact-line friction"};
    app.require_subcommand(1);
    std::string config_path;
    std::vector<std::string> overrides;
    std::vector<std::string> figure_tags;
    std::string out_dir;
    double figure_t_end = 0.0;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* o = sub->add_option("--config", config_path, "JSON config file");
        if (config_required) o->required();
        sub->add_option("--override", overrides, "key=value applied to the config");
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    };
    add_common(app.add_subcommand("selfsimilar", "self-similar profile for alpha = 4/(n+3)"), true);
    add_common(app.add_subcommand("asymptotics", "quasi-self-similar predictions"), true);
    add_common(app.add_subcommand("transient", "moving-boundary simulation"), true);
    auto* fig = app.add_subcommand("figure", "desk-scale figure reproduction");
    add_common(fig, false);
    fig->add_option("tags", figure_tags, "fig1|fig3|fig5|fig6|fig7|fig8|fig9")->required();
    fig->add_option("--t-end", figure_t_end, "end time of the long runs");
    add_common(app.add_subcommand("sweep", "transient runs over an (n, alpha) grid"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "tfe: ParseError: " << one_line(e.what()) << '\n';
        return 1;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        std::string text;
        if (!config_path.empty()) {
            text = read_file(config_path);
        } else {
            text = R"({"command": "figure"})";
        }
        if (!out_dir.empty()) overrides.push_back("output_dir=\"" + out_dir + "\"");
        if (name == "figure") {
            Json tags = figure_tags;
            overrides.push_back("figures=" + tags.dump());
            if (figure_t_end > 0.0) overrides.push_back("figure_t_end=" + num(figure_t_end));
        }
        RunConfig cfg = parse_config(text, overrides);
        if (to_string(cfg.command) != name) {
            fail(ErrorKind::ValidationError,
                 std::string("config command '") + to_string(cfg.command) + "' does not match subcommand '" + name + "'");
        }
        switch (cfg.command) {
            case Command::SelfSimilar: return cmd_selfsimilar(cfg);
            case Command::Asymptotics: return cmd_asymptotics(cfg);
            case Command::Transient: return cmd_transient(cfg);
            case Command::Figure: return cmd_figure(cfg);
            case Command::Sweep: return cmd_sweep(cfg);
        }
    } catch (const Error& e) {
        std::cerr << "tfe: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "tfe: internal: " << one_line(e.what()) << '\n';
        return 2;
    }
    return 0;
}
