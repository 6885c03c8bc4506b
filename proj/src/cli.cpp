#include "hisim/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hisim/action_angle.hpp"
#include "hisim/ergodic.hpp"
#include "hisim/errors.hpp"
#include "hisim/flow.hpp"
#include "hisim/iembd.hpp"
#include "hisim/io.hpp"
#include "hisim/parallel.hpp"
#include "hisim/resonance.hpp"

namespace hisim {

namespace {

struct Options {
    std::string config;
    std::string out;
    double E = 0.0, E1 = 0.0;
    int e1_steps = 100;
    double emin = 0.0, emax = 6.0;
    int res = 400;
    unsigned workers = 0;
    int m = 0, n = 0;
    double c = 1.0;
    int grid = 1000;
    std::string start;
    double T = 100.0;
    std::string mode = "billiard";
    double sample_dt = 0.0;
    int axis = 1;
    int points = 100;
    int cells = 64;
    int starts = 32;
    std::uint64_t seed = 1;
    double tol = 5e-2;
    std::string cells_out, svg;
    double e1_min = 0.0, e1_max = 0.0;
    int steps = 16;
};

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty())
        out << text;
    else
        write_text(o.out, text);
}

std::optional<ResonanceSpec> spec_of(const Options& o) {
    if (o.m == 0 && o.n == 0) return std::nullopt;
    return ResonanceSpec::make(o.m, o.n, o.c);
}

// Potentials for resonant runs come from (m, n, c) unless the config names them.
void apply_spec(Config& cfg, const std::optional<ResonanceSpec>& spec) {
    if (spec && !cfg.has_potentials) {
        cfg.V1 = spec->V1();
        cfg.V2 = spec->V2();
    }
}

int cmd_validate(const Options& o, std::ostream& out) {
    const Config cfg = load_config(o.config);
    if (o.E == 0.0 && o.E1 == 0.0) {
        std::ostringstream os;
        os << "valid polygon; steps";
        for (Quadrant q : kQuadrants) os << ' ' << label(q) << '=' << cfg.polygon[q].size();
        os << "; g_max=" << g_max(cfg.polygon) << "; V1: " << cfg.V1.describe() << "; V2: " << cfg.V2.describe()
           << '\n';
        out << os.str();
        return 0;
    }
    // With --E and --E1: the clipped table in psi coordinates.
    const BilliardTable t = build_table(cfg.polygon, cfg.V1, cfg.V2, o.E, o.E1);
    std::ostringstream os;
    os << "quadrant,entry,step,psi1,psi2,width_is_extremal,height_is_extremal,w,h\n";
    for (Quadrant q : kQuadrants) {
        const auto& qt = t[q];
        for (std::size_t i = 0; i < qt.psi1.size(); ++i)
            os << label(q) << ',' << i << ',' << (qt.is_rectangle() ? 0 : qt.kunder + int(i)) << ',' << num(qt.psi1[i])
               << ',' << num(qt.psi2[i]) << ',' << qt.width_is_extremal << ',' << qt.height_is_extremal << ','
               << num(t.w) << ',' << num(t.h) << '\n';
    }
    emit(o, out, os.str());
    return 0;
}

int cmd_psi_table(const Options& o, std::ostream& out) {
    const Config cfg = load_config(o.config);
    if (o.axis != 1 && o.axis != 2) throw DomainError("psi-table: --axis must be 1 or 2");
    if (o.points < 1) throw DomainError("psi-table: --points must be positive");
    const Potential& V = o.axis == 1 ? cfg.V1 : cfg.V2;
    const double xm = x_max(V, o.E);
    std::ostringstream os;
    os << "x,E,psi,dpsi_dE\n";
    // x runs over [0, x_max); d psi / dE diverges at the turning point itself.
    for (int i = 0; i < o.points; ++i) {
        const double x = xm * i / o.points;
        os << num(x) << ',' << num(o.E) << ',' << num(psi(V, x, o.E)) << ',' << num(dpsi_dE(V, x, o.E)) << '\n';
    }
    emit(o, out, os.str());
    return 0;
}

int cmd_genus(const Options& o, std::ostream& out) {
    const Config cfg = load_config(o.config);
    if (!(o.E > 0.0)) throw DomainError("genus: --E must be positive");
    if (o.e1_steps < 1) throw DomainError("genus: --e1-steps must be positive");
    std::ostringstream os;
    os << "E1,genus\n";
    for (int i = 0; i < o.e1_steps; ++i) {
        const double E1 = o.E * (i + 0.5) / o.e1_steps;
        os << num(E1) << ',' << genus(cfg.polygon, cfg.V1, cfg.V2, o.E, E1) << '\n';
    }
    emit(o, out, os.str());
    return 0;
}

int cmd_iembd(const Options& o, std::ostream& out) {
    const Config cfg = load_config(o.config);
    const Diagram d = diagram(cfg.polygon, cfg.V1, cfg.V2, o.emin, o.emax, o.res, o.workers);
    if (o.out.empty()) {
        out << diagram_csv(d);
        return 0;
    }
    std::stringstream list(o.out);
    for (std::string path; std::getline(list, path, ',');) {
        if (path.ends_with(".svg"))
            write_text(path, diagram_svg(d));
        else if (path.ends_with(".csv"))
            write_text(path, diagram_csv(d));
        else
            throw DomainError("iembd: output '" + path + "' must end in .svg or .csv");
    }
    return 0;
}

int cmd_resonance(const Options& o, std::ostream& out) {
    Config cfg = load_config(o.config);
    const auto spec = spec_of(o);
    if (!spec) throw DomainError("resonance: --m and --n are required");
    apply_spec(cfg, spec);
    const EnergyPartition p = partition(cfg.polygon, cfg.V1, cfg.V2, o.E);
    std::ostringstream os;
    os << "E1_lo,E1_hi,genus,kind,u_class,delta_green,delta_red,periodic_fraction,scenario\n";
    for (const auto& li : p.intervals) {
        const char* kind = li.nonimpacting                  ? "nonimpacting"
                           : li.interior_impact             ? "interior_impact"
                           : li.touches_extremal_vertical   ? (li.touches_extremal_horizontal ? "extremal_both"
                                                                                              : "extremal_vertical")
                                                            : "extremal_horizontal";
        std::vector<USubinterval> parts;
        if (li.interior_impact)
            parts = classify_U(cfg.polygon, *spec, o.E, li.lo, li.hi, o.grid);
        else
            parts.push_back({li.lo, li.hi, false});
        for (const auto& u : parts) {
            const double mid = 0.5 * (u.lo + u.hi);
            const double dg = delta_colour(cfg.polygon, *spec, o.E, mid, Colour::Green);
            const double dr = delta_colour(cfg.polygon, *spec, o.E, mid, Colour::Red);
            const char* uc = !li.interior_impact ? "" : u.plus ? "U+" : "U-";
            std::string frac;
            if (li.interior_impact && !u.plus) frac = num(cylinder_fractions(cfg.polygon, *spec, o.E, mid).periodic);
            os << num(u.lo) << ',' << num(u.hi) << ',' << li.genus << ',' << kind << ',' << uc << ',' << num(dg) << ','
               << num(dr) << ',' << frac << ','
               << scenario_name(scenario(cfg.polygon, cfg.V1, cfg.V2, o.E, u.lo, u.hi, spec)) << '\n';
        }
    }
    emit(o, out, os.str());
    return 0;
}

// "x,y,sx,sy" with sx, sy in {+1, -1}.
PhaseState parse_start(const Options& o, const Config& cfg) {
    std::vector<double> v;
    std::stringstream in(o.start);
    for (std::string tok; std::getline(in, tok, ',');) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw DomainError("simulate: --start must be \"x,y,sx,sy\"");
        }
    }
    if (v.size() != 4) throw DomainError("simulate: --start must be \"x,y,sx,sy\"");
    if (std::fabs(v[2]) != 1.0 || std::fabs(v[3]) != 1.0) throw DomainError("simulate: sx and sy must be +1 or -1");
    if (!(o.E1 > 0.0 && o.E1 < o.E)) throw DomainError("simulate: requires 0 < E1 < E");
    const double g1 = o.E1 - cfg.V1(v[0]), g2 = o.E - o.E1 - cfg.V2(v[1]);
    if (g1 < 0.0 || g2 < 0.0) throw DomainError("simulate: start lies outside the projected rectangle");
    return {v[0], v[1], v[2] * std::sqrt(2.0 * g1), v[3] * std::sqrt(2.0 * g2)};
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const Config cfg = load_config(o.config);
    const PhaseState start = parse_start(o, cfg);
    const LevelSetMap map(cfg.V1, cfg.V2, o.E, o.E1);

    // Events and samples merged in time order; samples have kind "sample" and no wall.
    std::vector<std::pair<double, std::string>> rows;
    auto row = [&](double t, const char* kind, const std::string& wall, const PhaseState& ph, const PsiState* ps) {
        std::ostringstream os;
        os << num(t) << ',' << kind << ',' << wall << ',' << num(ph.x) << ',' << num(ph.y) << ',' << num(ph.px) << ','
           << num(ph.py) << ',';
        if (ps) os << num(ps->psi1) << ',' << num(ps->psi2) << ',' << ps->s1 << ',' << ps->s2;
        else os << ",,,";
        os << '\n';
        rows.emplace_back(t, os.str());
    };
    auto kind_of = [](EventKind k) {
        return k == EventKind::Wall ? "wall" : k == EventKind::Turning ? "turning" : "corner_death";
    };
    auto wall_of = [](EventKind k, const WallId& w) { return k == EventKind::CornerDeath ? std::string() : w.str(); };
    if (o.mode == "billiard") {
        const BilliardTable t = build_table(cfg.polygon, cfg.V1, cfg.V2, o.E, o.E1);
        BilliardOptions opt;
        opt.sample_dt = o.sample_dt;
        const auto traj = billiard_flow(t, map.to_psi(start), o.T, opt);
        for (const auto& e : traj.events) row(e.time, kind_of(e.kind), wall_of(e.kind, e.wall), map.from_psi(e.after), &e.after);
        for (const auto& [ts, s] : traj.samples) row(ts, "sample", "", map.from_psi(s), &s);
    } else if (o.mode == "physical") {
        StepControl ctl;
        ctl.sample_dt = o.sample_dt;
        const auto traj = physical_flow(cfg.polygon, cfg.V1, cfg.V2, o.E, o.E1, start, o.T, ctl);
        for (const auto& e : traj.events) row(e.time, kind_of(e.kind), wall_of(e.kind, e.wall), e.after, nullptr);
        for (const auto& [ts, s] : traj.samples) row(ts, "sample", "", s, nullptr);
    } else {
        throw DomainError("simulate: --mode must be billiard or physical");
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string text = "t,kind,wall,x,y,px,py,psi1,psi2,s1,s2\n";
    for (const auto& r : rows) text += r.second;
    emit(o, out, text);
    return 0;
}

// Ensemble of stratified starts run in parallel; orbits that die at a corner are dropped and counted.
std::vector<BilliardTrajectory> run_ensemble(const BilliardTable& t, int count, std::uint64_t seed, double T,
                                             unsigned workers, int* died) {
    const auto starts = stratified_starts(t, count, seed);
    std::vector<BilliardTrajectory> all(starts.size());
    parallel_for(starts.size(), workers, [&](std::size_t i) { all[i] = billiard_flow(t, starts[i], T); });
    std::vector<BilliardTrajectory> alive;
    *died = 0;
    for (auto& tr : all) {
        if (tr.died)
            ++*died;
        else
            alive.push_back(std::move(tr));
    }
    return alive;
}

int cmd_ergodic(const Options& o, std::ostream& out) {
    const Config cfg = load_config(o.config);
    const BilliardTable t = build_table(cfg.polygon, cfg.V1, cfg.V2, o.E, o.E1);
    if (!(o.T > 0.0)) throw DomainError("ergodic-test: --T must be positive");
    int died = 0;
    const auto ens = run_ensemble(t, o.starts, o.seed, o.T, o.workers, &died);
    if (ens.empty()) throw DomainError("ergodic-test: every start died at a corner");
    const Grid g = Grid::rectangle(cfg.V1, cfg.V2, o.E, o.E1, o.cells, o.cells);
    const auto r = equidistribution_test(ens, cfg.polygon, cfg.V1, cfg.V2, o.E, o.E1, g, o.tol);

    nlohmann::ordered_json j;
    j["E"] = o.E;
    j["E1"] = o.E1;
    j["T"] = o.T;
    j["grid"] = o.cells;
    j["starts"] = o.starts;
    j["seed"] = o.seed;
    j["died"] = died;
    j["active_cells"] = r.active_cells;
    j["sup_cell_error"] = r.sup_cell_error;
    j["tolerance"] = o.tol;
    j["passed"] = r.passed;
    emit(o, out, j.dump(2) + "\n");

    if (!o.cells_out.empty()) {
        std::ostringstream os;
        os << "i,j,x_lo,x_hi,y_lo,y_hi,empirical,expected\n";
        for (int i = 0; i < g.nx; ++i)
            for (int k = 0; k < g.ny; ++k)
                os << i << ',' << k << ',' << num(g.x_edge(i)) << ',' << num(g.x_edge(i + 1)) << ','
                   << num(g.y_edge(k)) << ',' << num(g.y_edge(k + 1)) << ',' << num(r.empirical(i, k)) << ','
                   << num(r.expected(i, k)) << '\n';
        write_text(o.cells_out, os.str());
    }
    if (!o.svg.empty()) {
        CellField ratio = CellField::Zero(g.nx, g.ny);
        for (int i = 0; i < g.nx; ++i)
            for (int k = 0; k < g.ny; ++k)
                if (r.expected(i, k) > 0.0) ratio(i, k) = r.empirical(i, k) / r.expected(i, k);
        write_text(o.svg + "-empirical.svg", heatmap_svg(r.empirical, "empirical occupancy"));
        write_text(o.svg + "-density.svg", heatmap_svg(r.expected, "invariant density cell mass"));
        write_text(o.svg + "-ratio.svg", heatmap_svg(ratio, "empirical / expected"));
    }
    return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    Config cfg = load_config(o.config);
    const auto spec = spec_of(o);
    apply_spec(cfg, spec);
    if (o.steps < 1) throw DomainError("sweep: --steps must be positive");
    const double lo = o.e1_max > o.e1_min ? o.e1_min : 0.0;
    const double hi = o.e1_max > o.e1_min ? o.e1_max : o.E;
    if (!(lo >= 0.0 && hi <= o.E)) throw DomainError("sweep: E1 range must lie in [0, E]");
    const EnergyPartition p = partition(cfg.polygon, cfg.V1, cfg.V2, o.E);

    std::vector<std::string> rows(o.steps);
    // Each E1 point is independent; its seed depends only on the run seed and the point index.
    parallel_for(o.steps, o.workers, [&](std::size_t i) {
        const double E1 = lo + (hi - lo) * (i + 0.5) / o.steps;
        const LabelledInterval* in = nullptr;
        for (const auto& li : p.intervals)
            if (li.lo <= E1 && E1 <= li.hi) in = &li;
        const Scenario sc = scenario(cfg.polygon, cfg.V1, cfg.V2, o.E, in->lo, in->hi, spec);
        const BilliardTable t = build_table(cfg.polygon, cfg.V1, cfg.V2, o.E, E1);
        int died = 0;
        const auto ens = run_ensemble(t, o.starts, splitmix64(o.seed ^ splitmix64(i + 1)), o.T, 1, &died);
        std::string err = "", pass = "";
        if (!ens.empty()) {
            const Grid g = Grid::rectangle(cfg.V1, cfg.V2, o.E, E1, o.cells, o.cells);
            const auto r = equidistribution_test(ens, cfg.polygon, cfg.V1, cfg.V2, o.E, E1, g, o.tol);
            err = num(r.sup_cell_error);
            pass = r.passed ? "1" : "0";
        }
        std::ostringstream os;
        os << num(E1) << ',' << in->genus << ',' << in->nonimpacting << ',' << scenario_name(sc) << ',' << err << ','
           << pass << ',' << died << '\n';
        rows[i] = os.str();
    });
    std::string text = "E1,genus,nonimpacting,scenario,sup_cell_error,passed,died\n";
    for (const auto& r : rows) text += r;
    emit(o, out, text);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Impact oscillators in star-shaped right-angled polygons", "hisim"};
    app.require_subcommand(1);
    Options o;

    auto config = [&](CLI::App* s) { s->add_option("--config", o.config, "polygon/potential JSON")->required(); };
    auto energies = [&](CLI::App* s, bool e1) {
        s->add_option("--E", o.E, "total energy")->required();
        if (e1) s->add_option("--E1", o.E1, "partial energy of the first oscillator")->required();
    };
    auto output = [&](CLI::App* s) { s->add_option("--out", o.out, "output path (default stdout)"); };

    auto* validate = app.add_subcommand("validate", "check a configuration; with --E/--E1 print the psi table");
    config(validate);
    validate->add_option("--E", o.E, "total energy");
    validate->add_option("--E1", o.E1, "partial energy of the first oscillator");
    output(validate);

    auto* psi = app.add_subcommand("psi-table", "psi(x, E) and d psi / dE for one potential");
    config(psi);
    energies(psi, false);
    psi->add_option("--axis", o.axis, "1 for V1, 2 for V2");
    psi->add_option("--points", o.points, "samples of x in [0, x_max)");
    output(psi);

    auto* gen = app.add_subcommand("genus", "genus along an E1 sweep");
    config(gen);
    energies(gen, false);
    gen->add_option("--e1-steps", o.e1_steps, "number of E1 samples");
    output(gen);

    auto* iem = app.add_subcommand("iembd", "impact energy-momentum bifurcation diagram");
    config(iem);
    iem->add_option("--emin", o.emin, "smallest E");
    iem->add_option("--emax", o.emax, "largest E")->required();
    iem->add_option("--res", o.res, "cells per axis");
    iem->add_option("--workers", o.workers, "threads (0 = all cores)");
    output(iem);

    auto* res = app.add_subcommand("resonance", "resonant decomposition and scenarios");
    config(res);
    energies(res, false);
    res->add_option("--m", o.m, "Omega = n/m")->required();
    res->add_option("--n", o.n, "Omega = n/m")->required();
    res->add_option("--c", o.c, "frequency scale");
    res->add_option("--grid", o.grid, "sign-change detection grid");
    output(res);

    auto* sim = app.add_subcommand("simulate", "one orbit");
    config(sim);
    energies(sim, true);
    sim->add_option("--start", o.start, "x,y,sx,sy")->required();
    sim->add_option("--t,--T", o.T, "time horizon");
    sim->add_option("--mode", o.mode, "billiard or physical");
    sim->add_option("--sample-dt", o.sample_dt, "uniform sampling step (0 = events only)");
    output(sim);

    auto* erg = app.add_subcommand("ergodic-test", "equidistribution against the invariant density");
    config(erg);
    energies(erg, true);
    erg->add_option("--T", o.T, "time horizon per orbit");
    erg->add_option("--grid", o.cells, "cells per axis");
    erg->add_option("--starts", o.starts, "ensemble size");
    erg->add_option("--seed", o.seed, "random seed");
    erg->add_option("--tol", o.tol, "sup cell error tolerance");
    erg->add_option("--workers", o.workers, "threads (0 = all cores)");
    erg->add_option("--cells", o.cells_out, "per-cell CSV");
    erg->add_option("--svg", o.svg, "heat map path prefix");
    output(erg);

    auto* sw = app.add_subcommand("sweep", "scenario and equidistribution over an E1 range");
    config(sw);
    energies(sw, false);
    sw->add_option("--e1-min", o.e1_min, "first E1 (default 0)");
    sw->add_option("--e1-max", o.e1_max, "last E1 (default E)");
    sw->add_option("--steps", o.steps, "number of E1 points");
    sw->add_option("--T", o.T, "time horizon per orbit");
    sw->add_option("--grid", o.cells, "cells per axis");
    sw->add_option("--starts", o.starts, "ensemble size per point");
    sw->add_option("--seed", o.seed, "random seed");
    sw->add_option("--tol", o.tol, "sup cell error tolerance");
    sw->add_option("--m", o.m, "resonance m");
    sw->add_option("--n", o.n, "resonance n");
    sw->add_option("--c", o.c, "resonance scale");
    sw->add_option("--workers", o.workers, "threads (0 = all cores)");
    output(sw);

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (validate->parsed()) return cmd_validate(o, out);
        if (psi->parsed()) return cmd_psi_table(o, out);
        if (gen->parsed()) return cmd_genus(o, out);
        if (iem->parsed()) return cmd_iembd(o, out);
        if (res->parsed()) return cmd_resonance(o, out);
        if (sim->parsed()) return cmd_simulate(o, out);
        if (erg->parsed()) return cmd_ergodic(o, out);
        if (sw->parsed()) return cmd_sweep(o, out);
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return 3;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

int run(int argc, char** argv) { return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr); }

}  // namespace hisim
