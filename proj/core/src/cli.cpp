#include "psg/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psg/errors.hpp"
#include "psg/families.hpp"
#include "psg/geometry.hpp"
#include "psg/io.hpp"
#include "psg/julia.hpp"
#include "psg/parallel.hpp"
#include "psg/randomdyn.hpp"
#include "psg/semigroup.hpp"
#include "psg/thermo.hpp"
#include "psg/transversality.hpp"

namespace psg::cli {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(ErrorCode::Validation, "section '" + section + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) fail(ErrorCode::Validation, "unknown key '" + it.key() + "' in section '" + section + "'");
    }
}

cpx parse_cpx(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(ErrorCode::Validation, what + " must be a two-element [re, im] array");
    return cpx(j[0].get<double>(), j[1].get<double>());
}

double get_num(const json& j, const std::string& key, double dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) fail(ErrorCode::Validation, "field '" + key + "' must be a number");
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& key, int dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number_integer()) fail(ErrorCode::Validation, "field '" + key + "' must be an integer");
    return j[key].get<int>();
}

std::string get_str(const json& j, const std::string& key, const std::string& dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_string()) fail(ErrorCode::Validation, "field '" + key + "' must be a string");
    return j[key].get<std::string>();
}

struct FamilySpec {
    MultiMap map;
    // d1d2 parameters kept for the t1 subcommand
    std::optional<D1D2Params> d1d2;
    bool affine = false;
};

FamilySpec parse_family(const json& cfg) {
    if (!cfg.contains("family")) fail(ErrorCode::Validation, "missing 'family' section");
    const json& fam = cfg["family"];
    require_keys(fam, "family",
                 {"kind", "name", "vertices", "sides", "d1", "d2", "b", "t", "a", "variant", "lambda",
                  "generators"});
    std::string kind = get_str(fam, "kind", "");

    if (kind == "named") {
        std::string name = get_str(fam, "name", "");
        if (name == "interval") return {make_interval(), std::nullopt, true};
        if (name == "sierpinski") {
            cpx p1(1, 0), p2(-0.5, std::sqrt(3.0) / 2), p3(-0.5, -std::sqrt(3.0) / 2);
            if (fam.contains("vertices")) {
                const json& v = fam["vertices"];
                if (!v.is_array() || v.size() != 3)
                    fail(ErrorCode::Validation, "field 'vertices' needs exactly 3 entries");
                p1 = parse_cpx(v[0], "vertices[0]");
                p2 = parse_cpx(v[1], "vertices[1]");
                p3 = parse_cpx(v[2], "vertices[2]");
            }
            return {make_sierpinski(p1, p2, p3), std::nullopt, true};
        }
        if (name == "snowflake") return {make_snowflake(), std::nullopt, true};
        if (name == "pentakun") return {make_pentakun(), std::nullopt, true};
        if (name == "nkun") return {make_nkun(get_int(fam, "sides", 6)), std::nullopt, true};
        fail(ErrorCode::Validation, "unknown named family '" + name + "'");
    }
    if (kind == "d1d2") {
        if (!fam.contains("b")) fail(ErrorCode::Validation, "d1d2 family needs field 'b'");
        D1D2Params p = D1D2Params::make(get_int(fam, "d1", 3), get_int(fam, "d2", 2),
                                        parse_cpx(fam["b"], "b"), get_num(fam, "t", 0.1));
        return {make_d1d2(p), p, false};
    }
    if (kind == "quadratic_pair") {
        if (!fam.contains("a")) fail(ErrorCode::Validation, "quadratic_pair family needs field 'a'");
        std::string variant = get_str(fam, "variant", "additive");
        QuadKind qk;
        if (variant == "additive")
            qk = QuadKind::Additive;
        else if (variant == "translation")
            qk = QuadKind::Translation;
        else
            fail(ErrorCode::Validation, "field 'variant' must be additive or translation");
        cpx lambda = fam.contains("lambda") ? parse_cpx(fam["lambda"], "lambda") : cpx(0, 0);
        return {make_quadratic_pair(parse_cpx(fam["a"], "a"), qk, lambda), std::nullopt, false};
    }
    if (kind == "explicit") {
        if (!fam.contains("generators") || !fam["generators"].is_array() || fam["generators"].empty())
            fail(ErrorCode::Validation, "explicit family needs a nonempty 'generators' array");
        std::vector<Polynomial> gens;
        for (const json& g : fam["generators"]) {
            if (!g.is_array() || g.size() < 2)
                fail(ErrorCode::Validation, "each generator needs at least 2 coefficients");
            std::vector<cpx> coeffs;
            for (const json& c : g) coeffs.push_back(parse_cpx(c, "coefficient"));
            gens.push_back(Polynomial(std::move(coeffs)));
        }
        MultiMap m(std::move(gens));
        bool affine = m.all_affine();
        return {std::move(m), std::nullopt, affine};
    }
    fail(ErrorCode::Validation, "family 'kind' must be named, d1d2, quadratic_pair or explicit");
}

Metric parse_metric(const json& j) {
    std::string m = get_str(j, "metric", "euclidean");
    if (m == "euclidean") return Metric::Euclidean;
    if (m == "spherical") return Metric::Spherical;
    fail(ErrorCode::Validation, "field 'metric' must be euclidean or spherical");
}

EPWord parse_word(const json& j, const std::string& what) {
    require_keys(j, what, {"preperiod", "period"});
    EPWord w;
    if (j.contains("preperiod"))
        for (const json& s : j["preperiod"]) w.preperiod.symbols.push_back(s.get<std::uint8_t>());
    if (!j.contains("period") || j["period"].empty())
        fail(ErrorCode::Validation, what + " needs a nonempty 'period'");
    for (const json& s : j["period"]) w.period.symbols.push_back(s.get<std::uint8_t>());
    return w;
}

PointCloud cloud_from(const FamilySpec& fam, const json& sec, std::uint64_t seed) {
    auto n = static_cast<std::size_t>(get_int(sec, "points", 200000));
    int burn = get_int(sec, "burn_in", 256);
    return backward_orbit(fam.map, n, burn, seed);
}

std::string out_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

json section(const json& cfg, const std::string& name) {
    return cfg.contains(name) ? cfg[name] : json::object();
}

PerturbationFamily parse_perturbation(const json& sec, MultiMap base) {
    const json& p = sec.contains("perturbation") ? sec["perturbation"] : json::object();
    require_keys(p, "perturbation", {"kind", "index", "exponent", "a1", "b1"});
    std::string kind = get_str(p, "kind", "monomial");
    int index = get_int(p, "index", base.count());
    if (kind == "monomial")
        return PerturbationFamily::monomial(std::move(base), index, get_int(p, "exponent", 0));
    if (kind == "derivative") return PerturbationFamily::derivative_perturb(std::move(base), index);
    if (kind == "translation") return PerturbationFamily::translation(std::move(base), index);
    if (kind == "conjugation") {
        cpx a1 = p.contains("a1") ? parse_cpx(p["a1"], "a1") : cpx(0, 0);
        cpx b1 = p.contains("b1") ? parse_cpx(p["b1"], "b1") : cpx(1, 0);
        return PerturbationFamily::conjugation(std::move(base), index, a1, b1);
    }
    fail(ErrorCode::Validation, "perturbation 'kind' must be monomial, derivative, translation or conjugation");
}

void attach_estimate(MultiMap& map, const PointCloud& cloud, const json& sec) {
    if (map.all_affine()) {
        double eta = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= map.count(); ++j) eta = std::min(eta, std::abs(map.gen(j).coeffs()[1]));
        if (!(eta > 1.0)) fail(ErrorCode::NotExpanding, "affine generators must have |a| > 1");
        ExpandingEstimate est;
        est.C = 1.0;
        est.eta = eta;
        est.user_supplied = true;
        map.expanding_estimate() = est;
        return;
    }
    int level = get_int(sec, "expanding_level", 5);
    map.expanding_estimate() = estimate_expanding(map, cloud, level);
}

int cmd_render(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t seed) {
    json sec = section(cfg, "render");
    require_keys(sec, "render", {"points", "burn_in", "bbox", "resolution"});
    PointCloud cloud = cloud_from(fam, sec, seed);
    cpx lo, hi;
    if (sec.contains("bbox")) {
        lo = parse_cpx(sec["bbox"][0], "bbox[0]");
        hi = parse_cpx(sec["bbox"][1], "bbox[1]");
    } else {
        cloud.bounding_box(lo, hi);
        cpx pad = 0.05 * (hi - lo) + cpx(1e-9, 1e-9);
        lo -= pad;
        hi += pad;
    }
    int nx = 1024, ny = 1024;
    if (sec.contains("resolution")) {
        nx = sec["resolution"][0].get<int>();
        ny = sec["resolution"][1].get<int>();
    }
    GridRaster raster = rasterize(cloud, lo, hi, nx, ny);
    write_pgm(raster, out_path(out, "julia.pgm"));
    std::printf("points %zu occupied %zu outside %zu\n", cloud.count(), raster.occupied_cells(),
                raster.outside_count);
    return 0;
}

int cmd_bowen(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t) {
    json sec = section(cfg, "bowen");
    require_keys(sec, "bowen", {"level", "tol", "metric"});
    int level = get_int(sec, "level", 8);
    double tol = get_num(sec, "tol", 1e-6);
    Metric metric = parse_metric(sec);

    BowenResult res = bowen_parameter(fam.map, level, tol);
    // second base point run exposes base-point sensitivity
    cpx z1 = pressure_base_point(fam.map);
    BowenResult res2 = bowen_parameter(fam.map, level, tol, z1, metric);

    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "delta %.12g\nbracket %.12g %.12g\nlevel %d\nresidual %.3g\n"
                  "second_base_delta %.12g\nsecond_base_point (%.9g,%.9g)\nheuristic_constants true\n",
                  res.delta, res.bracket_lo, res.bracket_hi, res.level, res.residual, res2.delta,
                  z1.real(), z1.imag());
    write_text_file(out_path(out, "bowen.txt"), buf);
    std::printf("delta %.6f\n", res.delta);
    return 0;
}

int cmd_moran(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t) {
    json sec = section(cfg, "moran");
    require_keys(sec, "moran", {"ratios"});
    std::vector<double> ratios;
    if (sec.contains("ratios")) {
        for (const json& r : sec["ratios"]) ratios.push_back(r.get<double>());
    } else {
        ratios = affine_ratios(fam.map);
    }
    double delta = moran_delta(ratios);
    char buf[64];
    std::snprintf(buf, sizeof buf, "delta %.12g\n", delta);
    write_text_file(out_path(out, "moran.txt"), buf);
    std::printf("delta %.9f\n", delta);
    return 0;
}

int cmd_dim(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t seed) {
    json sec = section(cfg, "dim");
    require_keys(sec, "dim", {"points", "burn_in", "scales", "plateau_tol"});
    PointCloud cloud = cloud_from(fam, sec, seed);
    int scales = get_int(sec, "scales", 8);
    DimensionFit fit = box_dimension(cloud, scales);
    AreaEstimate area = area_estimate(cloud, scales, get_num(sec, "plateau_tol", 0.2));
    write_text_file(out_path(out, "dim.csv"), dimension_csv(fit, area));
    char buf[256];
    std::snprintf(buf, sizeof buf, "dimension %.6f\nr_squared %.6f\narea %.6g\npositive %s\n",
                  fit.dimension, fit.r_squared, area.extrapolated, area.positive ? "true" : "false");
    write_text_file(out_path(out, "dim.txt"), buf);
    std::printf("dimension %.6f area %.6g positive %s\n", fit.dimension, area.extrapolated,
                area.positive ? "true" : "false");
    return 0;
}

int cmd_t1(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t) {
    if (!fam.d1d2.has_value()) fail(ErrorCode::Validation, "t1 needs a d1d2 family");
    json sec = section(cfg, "t1");
    require_keys(sec, "t1", {"tol", "boundary_samples", "margin_scale"});
    T1Options opts;
    opts.tol = get_num(sec, "tol", 1e-4);
    opts.boundary_samples = get_int(sec, "boundary_samples", 720);
    opts.margin_scale = get_num(sec, "margin_scale", 1e-3);
    const D1D2Params& p = fam.d1d2.value();
    T1Result res = find_t1(p.d1, p.d2, p.b, opts);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "t1 %.12g\nupper_bound %.12g\ncertified_lower %.12g\npredicate_evals %d\n",
                  res.t1, res.upper_bound, res.certified_lower, res.predicate_evals);
    write_text_file(out_path(out, "t1.txt"), buf);
    std::printf("t1 %.9f\n", res.t1);
    return 0;
}

int cmd_atc(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t seed) {
    json sec = section(cfg, "atc");
    require_keys(sec, "atc", {"points", "burn_in", "tol", "terms", "expanding_level", "perturbation"});
    PointCloud cloud = cloud_from(fam, sec, seed);
    double tol = get_num(sec, "tol", 1e-2);
    int terms = get_int(sec, "terms", 64);

    AtcReport rep;
    if (fam.affine && !sec.contains("perturbation")) {
        rep = atc_certify_affine(fam.map, cloud, tol, terms).report;
    } else {
        MultiMap base = fam.map;
        attach_estimate(base, cloud, sec);
        PerturbationFamily pf = parse_perturbation(sec, std::move(base));
        rep = atc_certify(pf, cloud, tol, terms);
    }
    write_text_file(out_path(out, "atc.txt"), rep.to_text());
    if (rep.overlap_count == 0)
        std::printf("overlaps 0 / ATC vacuous\n");
    else
        std::printf("overlaps %d min_grad_modulus %.9g all_nonzero %s\n", rep.overlap_count,
                    rep.min_grad_modulus, rep.all_nonzero ? "true" : "false");
    return 0;
}

int cmd_tcprobe(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t seed) {
    json sec = section(cfg, "tcprobe");
    require_keys(sec, "tcprobe",
                 {"points", "burn_in", "tol", "expanding_level", "perturbation", "word1", "word2", "grid",
                  "radii", "path_steps", "collision_threshold", "seed_point"});
    PointCloud cloud = cloud_from(fam, sec, seed);
    MultiMap base = fam.map;
    attach_estimate(base, cloud, sec);
    PerturbationFamily pf = parse_perturbation(sec, std::move(base));

    EPWord w1, w2;
    std::optional<cpx> seed_pt;
    if (sec.contains("word1") && sec.contains("word2")) {
        w1 = parse_word(sec["word1"], "word1");
        w2 = parse_word(sec["word2"], "word2");
        if (sec.contains("seed_point")) seed_pt = parse_cpx(sec["seed_point"], "seed_point");
    } else {
        // default to the first detected overlap pair
        std::vector<OverlapPoint> ov = find_overlaps(fam.map, cloud, get_num(sec, "tol", 1e-2));
        if (ov.empty()) fail(ErrorCode::Inconclusive, "no overlap found to build a probe pair");
        w1 = ov.front().word_i;
        w2 = ov.front().word_j;
        seed_pt = ov.front().z;
    }

    GridSpec grid;
    if (sec.contains("grid")) {
        require_keys(sec["grid"], "grid", {"center", "radius", "n"});
        if (sec["grid"].contains("center")) grid.center = parse_cpx(sec["grid"]["center"], "center");
        grid.radius = get_num(sec["grid"], "radius", 0.05);
        grid.n = get_int(sec["grid"], "n", 64);
    }
    std::vector<double> radii;
    if (sec.contains("radii"))
        for (const json& r : sec["radii"]) radii.push_back(r.get<double>());
    else
        for (double r = 0.04; r > 0.004; r *= 0.7) radii.push_back(r);

    ContinuationOptions copts;
    copts.path_steps = get_int(sec, "path_steps", 64);
    copts.collision_threshold = get_num(sec, "collision_threshold", 1e-8);
    TcProbeResult res = tc_scaling_probe(pf, w1, w2, grid, radii, seed_pt, copts);
    write_text_file(out_path(out, "tcprobe.csv"), res.to_csv());
    std::printf("measure_exponent %.4f covering_exponent %.4f skipped %d\n", res.measure_exponent,
                res.covering_exponent, res.skipped_nodes);
    return 0;
}

int cmd_tinfty(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t seed) {
    json sec = section(cfg, "tinfty");
    require_keys(sec, "tinfty", {"p", "escape_radius", "max_iter", "trials", "bbox", "resolution", "z"});
    EscapeConfig ec;
    if (sec.contains("p"))
        for (const json& p : sec["p"]) ec.probabilities.push_back(p.get<double>());
    else
        ec.probabilities.assign(static_cast<std::size_t>(fam.map.count()),
                                1.0 / fam.map.count());
    ec.escape_radius = get_num(sec, "escape_radius", 2.0);
    ec.max_iter = get_int(sec, "max_iter", 200);
    ec.trials = get_int(sec, "trials", 1000);
    ec.seed = seed;

    if (sec.contains("z")) {
        TInfinityEstimate est = t_infinity(fam.map, ec, parse_cpx(sec["z"], "z"));
        std::printf("t_infinity %.6f std_error %.6f undecided %d\n", est.value, est.std_error,
                    est.undecided);
        return 0;
    }

    cpx lo(-1.5, -1.5), hi(1.5, 1.5);
    if (sec.contains("bbox")) {
        lo = parse_cpx(sec["bbox"][0], "bbox[0]");
        hi = parse_cpx(sec["bbox"][1], "bbox[1]");
    }
    int nx = 512, ny = 512;
    if (sec.contains("resolution")) {
        nx = sec["resolution"][0].get<int>();
        ny = sec["resolution"][1].get<int>();
    }
    ColiseumRaster raster = coliseum_raster(fam.map, ec, lo, hi, nx, ny);
    write_coliseum_pgm(raster, out_path(out, "tinfty.pgm"));
    std::printf("raster %dx%d trials %d\n", nx, ny, ec.trials);
    return 0;
}

int cmd_pressure(const FamilySpec& fam, const json& cfg, const std::string& out, std::uint64_t) {
    json sec = section(cfg, "pressure");
    require_keys(sec, "pressure", {"t_min", "t_max", "t_steps", "levels", "metric"});
    double t_min = get_num(sec, "t_min", 0.0);
    double t_max = get_num(sec, "t_max", 3.0);
    int steps = get_int(sec, "t_steps", 31);
    if (steps < 2 || !(t_max > t_min)) fail(ErrorCode::Validation, "bad t grid");
    std::vector<double> ts;
    for (int i = 0; i < steps; ++i) ts.push_back(t_min + (t_max - t_min) * i / (steps - 1));
    std::vector<int> levels;
    if (sec.contains("levels"))
        for (const json& l : sec["levels"]) levels.push_back(l.get<int>());
    else
        levels = {4, 6, 8};
    cpx z0 = pressure_base_point(fam.map);
    write_text_file(out_path(out, "pressure.csv"),
                    pressure_grid_csv(fam.map, ts, levels, z0, parse_metric(sec)));
    std::printf("pressure grid written (%zu t values, %zu levels)\n", ts.size(), levels.size());
    return 0;
}

int dispatch(const std::string& cmd, const json& cfg, const std::string& out, std::uint64_t seed) {
    FamilySpec fam = parse_family(cfg);
    if (cmd == "render") return cmd_render(fam, cfg, out, seed);
    if (cmd == "bowen") return cmd_bowen(fam, cfg, out, seed);
    if (cmd == "moran") return cmd_moran(fam, cfg, out, seed);
    if (cmd == "dim") return cmd_dim(fam, cfg, out, seed);
    if (cmd == "t1") return cmd_t1(fam, cfg, out, seed);
    if (cmd == "atc") return cmd_atc(fam, cfg, out, seed);
    if (cmd == "tcprobe") return cmd_tcprobe(fam, cfg, out, seed);
    if (cmd == "tinfty") return cmd_tinfty(fam, cfg, out, seed);
    if (cmd == "pressure") return cmd_pressure(fam, cfg, out, seed);
    fail(ErrorCode::Validation, "unknown subcommand '" + cmd + "'");
}

constexpr const char* kUsage =
    "usage: psglab <render|bowen|moran|dim|t1|atc|tcprobe|tinfty|pressure>"
    " --config PATH [--out DIR] [--threads N] [--seed K]\n";

}  // namespace

int run(int argc, const char* const* argv) {
    std::string cmd, config_path, out_dir = ".";
    long long seed_flag = -1;
    int threads = 0;

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        if (args.empty()) {
            std::fprintf(stderr, "%s", kUsage);
            return 2;
        }
        cmd = args[0];
        if (cmd == "--help" || cmd == "-h") {
            std::printf("%s", kUsage);
            return 0;
        }
        for (std::size_t i = 1; i < args.size(); ++i) {
            auto next = [&](const char* flag) -> std::string {
                if (i + 1 >= args.size()) fail(ErrorCode::Validation, std::string(flag) + " needs a value");
                return args[++i];
            };
            if (args[i] == "--config")
                config_path = next("--config");
            else if (args[i] == "--out")
                out_dir = next("--out");
            else if (args[i] == "--threads")
                threads = std::stoi(next("--threads"));
            else if (args[i] == "--seed")
                seed_flag = std::stoll(next("--seed"));
            else
                fail(ErrorCode::Validation, "unknown flag '" + args[i] + "'");
        }
        if (config_path.empty()) fail(ErrorCode::Validation, "--config is required");

        thread_override() = threads;

        json cfg = json::parse(read_text_file(config_path));
        require_keys(cfg, "(top level)",
                     {"seed", "threads", "family", "render", "bowen", "moran", "dim", "t1", "atc",
                      "tcprobe", "tinfty", "pressure"});
        std::uint64_t seed = 12345;
        if (cfg.contains("seed")) seed = cfg["seed"].get<std::uint64_t>();
        if (seed_flag >= 0) seed = static_cast<std::uint64_t>(seed_flag);
        if (threads == 0 && cfg.contains("threads")) thread_override() = cfg["threads"].get<int>();

        std::filesystem::create_directories(out_dir);
        return dispatch(cmd, cfg, out_dir, seed);
    } catch (const Error& e) {
        switch (e.code()) {
            case ErrorCode::Validation:
            case ErrorCode::BadVertices:
            case ErrorCode::BadModulus:
                std::fprintf(stderr, "validation error: %s\n", e.detail().c_str());
                return 2;
            default:
                std::fprintf(stderr, "ERROR %s %s\n", error_code_name(e.code()), e.detail().c_str());
                return 3;
        }
    } catch (const json::exception& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ERROR Internal %s\n", e.what());
        return 3;
    }
}

}  // namespace psg::cli
