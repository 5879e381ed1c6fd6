#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "posicone/bounds.hpp"
#include "posicone/chpt.hpp"
#include "posicone/io.hpp"
#include "posicone/rays.hpp"
#include "posicone/spectra.hpp"
#include "posicone/symmetry.hpp"

using namespace posicone;

namespace {

struct RunConfig {
    std::uint64_t seed = 20240611;
    double tol = 1e-9;
    int budget = 20000;
    std::string symmetry = "none";
    std::string out;
};

int exit_code(Verdict v) {
    switch (v) {
    case Verdict::PassesAllSampled: return 0;
    case Verdict::ViolatesElastic: return 2;
    case Verdict::ViolatesInelastic: return 3;
    }
    return 1;
}

BoundConfig bound_config(const RunConfig &rc) {
    BoundConfig c;
    c.elastic.seed = rc.seed;
    c.elastic.tol = rc.tol;
    c.inelastic.seed = rc.seed;
    c.inelastic.tol = rc.tol;
    c.inelastic.samples = rc.budget;
    return c;
}

void emit(const RunConfig &rc, const std::string &text) {
    if (rc.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(rc.out);
    if (!f) throw InputError("cannot write " + rc.out);
    f << text;
    if (!f) throw InputError("write failed for " + rc.out);
}

Vec parse_vec(const std::string &s, int expected, const char *what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception &) {
            throw InputError(std::string("bad number in ") + what + ": '" + tok + "'");
        }
    }
    if (static_cast<int>(v.size()) != expected)
        throw InputError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated values");
    return Eigen::Map<Vec>(v.data(), expected);
}

std::optional<Sector> sector_of(const RunConfig &rc) {
    if (rc.symmetry == "none") return std::nullopt;
    return parse_sector(rc.symmetry);
}

int cmd_dims(const RunConfig &rc) {
    Json rows = Json::array();
    for (int n = 1; n <= 5; ++n) {
        Json r{{"n", n}, {"dim_w", dim_w(n)}};
        if (n <= 4) r["projection_rank"] = numerical_rank(projection_operator(FlavorDim{n}));
        rows.push_back(r);
    }
    emit(rc, rows.dump(2) + "\n");
    return 0;
}

int cmd_check(const RunConfig &rc, const std::string &file, const std::string &fix) {
    if (file.empty() == fix.empty()) throw InputError("check needs exactly one of an input file or --fixture");
    const WTensor m = fix.empty() ? load_coefficients(file) : fixture(fix);
    const BoundConfig cfg = bound_config(rc);
    Json j;
    Verdict v;
    if (auto s = sector_of(rc)) {
        const SectorReport r = sector_membership(m, *s, cfg);
        j = report_json(r.bounds);
        j["symmetry"] = to_string(*s);
        j["invariance_residual"] = round12(r.invariance_residual);
        j["sector_consistent"] = r.consistent;
        v = r.bounds.verdict;
    } else {
        const BoundReport r = membership(m, cfg);
        j = report_json(r);
        v = r.verdict;
    }
    emit(rc, j.dump(2) + "\n");
    return exit_code(v);
}

Json verify_json(const WTensor &s) {
    const Classification c = classify(s);
    const KernelBasis k = kernel_basis(gram(s));
    Json j{{"in_cone", in_cone(s)},
           {"ranks", {c.rank_gram, c.rank_sym, c.rank_alt}},
           {"kernel_dim", k.dim()},
           {"extremal", is_extremal(s)},
           {"class", to_string(c.kind)}};
    if (c.kind == RayClass::NotExtremal) j["face_dim"] = face_space(s).dim;
    return j;
}

struct RayArgs {
    bool t1 = false, t2 = false, t3 = false;
    double d = 0, g = 0, h = 0;
    std::string alpha, beta, frame;
};

int cmd_ray(const RunConfig &rc, const RayArgs &a) {
    if (a.t1 + a.t2 + a.t3 != 1) throw InputError("ray needs exactly one of --type1, --type2, --type3");
    ExtremalRay r;
    if (a.t1) {
        if (a.alpha.empty()) throw InputError("--type1 needs --alpha");
        r = Type1{parse_vec(a.alpha, 3, "--alpha")};
    } else if (a.t2) {
        if (a.alpha.empty() || a.beta.empty()) throw InputError("--type2 needs --alpha and --beta");
        r = Type2{parse_vec(a.alpha, 3, "--alpha"), parse_vec(a.beta, 3, "--beta")};
    } else {
        Type3 t;
        if (!a.frame.empty()) {
            const Vec f = parse_vec(a.frame, 9, "--frame");
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) t.frame(i, j) = f(3 * i + j);
        }
        t.d = a.d;
        t.g = a.g;
        t.h = a.h;
        const double margin = type3_margin(t.d, t.g, t.h);
        if (!(margin > 0)) {
            Json e{{"error", "invalid type3 parameters: need g^2 + d^2 - 1 - d h > 0"}, {"margin", round12(margin)}};
            std::cerr << e.dump(2) << "\n";
            return 1;
        }
        r = t;
    }
    const WTensor s = to_tensor(r);
    if (s.max_abs() == 0.0) throw InputError("the ray tensor is zero");
    Json j{{"ray", ray_json(r)}, {"coefficients", coefficients_to_json(s)}, {"verification", verify_json(s)}};
    emit(rc, j.dump(2) + "\n");
    return 0;
}

int cmd_sample(const RunConfig &rc, const std::string &kind, int count) {
    RayKind k;
    if (kind == "type1") k = RayKind::Type1;
    else if (kind == "type2") k = RayKind::Type2;
    else if (kind == "type3") k = RayKind::Type3;
    else if (kind == "mixed") k = RayKind::Mixed;
    else throw InputError("unknown ray kind '" + kind + "'");
    RaySampler sampler(rc.seed);
    Json rows = Json::array();
    for (int a = 0; a < count; ++a) {
        const ExtremalRay r = sampler.sample(k);
        rows.push_back(Json{{"ray", ray_json(r)}, {"verification", verify_json(to_tensor(r))}});
    }
    emit(rc, rows.dump(2) + "\n");
    return 0;
}

struct RegionArgs {
    std::string input, fix = "fig1-ref", dir1 = "M1111", dir2 = "M1112";
    double window = 0.25;
    int steps = 200;
    double band = 0.02;
    int anchors = 9;
    unsigned threads = 0;
};

void print_counts(std::ostream &os, const RegionResult &r) {
    Json j{{"cells", r.cells.size()},
           {"elastic_fail", r.counts[0]},
           {"elastic_only", r.counts[1]},
           {"full_pass", r.counts[2]},
           {"boundary", r.counts[3]},
           {"pool_size", r.pool_size}};
    os << j.dump(2) << "\n";
}

void emit_region(const RunConfig &rc, const RegionResult &res) {
    std::ostringstream csv;
    write_region_csv(csv, res);
    emit(rc, csv.str());
    // counts go to stdout only when the CSV does not
    print_counts(rc.out.empty() ? std::cerr : std::cout, res);
}

int cmd_region(const RunConfig &rc, const RegionArgs &a) {
    const WTensor m0 = a.input.empty() ? fixture(a.fix) : load_coefficients(a.input);
    RegionConfig cfg;
    cfg.window1 = cfg.window2 = a.window;
    cfg.steps1 = cfg.steps2 = a.window == 0.0 ? 1 : a.steps;
    cfg.band = a.band;
    cfg.pool_samples = rc.budget;
    cfg.anchors = a.window == 0.0 ? 1 : a.anchors;
    cfg.seed = rc.seed;
    cfg.threads = a.threads;
    const RegionResult res =
        region_scan(m0, coefficient_direction(a.dir1, m0.n()), coefficient_direction(a.dir2, m0.n()), cfg);
    emit_region(rc, res);
    return 0;
}

struct ChptArgs {
    std::optional<double> l1, l2;
    bool scan = false;
    double step = 0.05;
    unsigned threads = 0;
};

int cmd_chpt(const RunConfig &rc, const ChptArgs &a) {
    if (a.scan) {
        if (!(a.step > 0)) throw InputError("--step must be positive");
        // M is linear in (l1, l2), so the scan is a two-direction region scan through the origin
        RegionConfig cfg;
        cfg.window1 = cfg.window2 = 2.0;
        cfg.steps1 = cfg.steps2 = static_cast<int>(std::lround(4.0 / a.step)) + 1;
        cfg.pool_samples = rc.budget;
        cfg.seed = rc.seed;
        cfg.threads = a.threads;
        const RegionResult res =
            region_scan(chpt_tensor({0, 0}), chpt_tensor({1, 0}), chpt_tensor({0, 1}), cfg);
        emit_region(rc, res);
        return 0;
    }
    if (!a.l1 || !a.l2) throw InputError("chpt needs --l1 and --l2, or --scan");
    const ChptReport r = chpt_bounds({*a.l1, *a.l2}, bound_config(rc));
    emit(rc, chpt_json(r).dump(2) + "\n");
    return exit_code(r.bounds.verdict);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"posicone: positivity cone tools for three-flavor four-point tensors"};
    app.set_help_flag("--help", "Print help and exit");
    app.require_subcommand(1);
    // global flags may also follow the subcommand name
    app.fallthrough();
    RunConfig rc;
    app.add_option("--seed", rc.seed, "Random seed")->capture_default_str();
    app.add_option("--tol", rc.tol, "Pass tolerance relative to the tensor scale")->capture_default_str()->check(
        CLI::PositiveNumber);
    app.add_option("--budget", rc.budget, "Sampled inelastic rays")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--symmetry", rc.symmetry, "Symmetry sector")
        ->capture_default_str()
        ->check(CLI::IsMember({"o3", "z2cubed", "so2", "none"}));
    app.add_option("--out", rc.out, "Write the main output here instead of stdout");

    auto *dims = app.add_subcommand("dims", "Dimension of W for n = 1..5");

    std::string check_file, check_fixture;
    auto *check = app.add_subcommand("check", "Check a coefficient file against the positivity bounds");
    check->add_option("file", check_file, "Coefficient JSON file");
    check->add_option("--fixture", check_fixture, "Built-in coefficient set (fig1-ref)");

    RayArgs ray_args;
    auto *ray = app.add_subcommand("ray", "Build an extremal ray and verify it");
    ray->add_flag("--type1", ray_args.t1);
    ray->add_flag("--type2", ray_args.t2);
    ray->add_flag("--type3", ray_args.t3);
    ray->add_option("-d", ray_args.d);
    ray->add_option("-g", ray_args.g);
    ray->add_option("-h", ray_args.h);
    ray->add_option("--alpha", ray_args.alpha, "a1,a2,a3");
    ray->add_option("--beta", ray_args.beta, "b1,b2,b3");
    ray->add_option("--frame", ray_args.frame, "Nine values, row-major; rows are the covectors");

    std::string sample_kind = "mixed";
    int sample_count = 10;
    auto *sample = app.add_subcommand("sample", "Sample extremal rays and verify them");
    sample->add_option("--kind", sample_kind)->capture_default_str()->check(
        CLI::IsMember({"type1", "type2", "type3", "mixed"}));
    sample->add_option("--count", sample_count)->capture_default_str()->check(CLI::PositiveNumber);

    RegionArgs region_args;
    auto *region = app.add_subcommand("region", "Scan a two-parameter slice and write a CSV");
    region->add_option("--input", region_args.input, "Reference point file (default: the fig1-ref fixture)");
    region->add_option("--fixture", region_args.fix)->capture_default_str();
    region->add_option("--dir1", region_args.dir1)->capture_default_str();
    region->add_option("--dir2", region_args.dir2)->capture_default_str();
    region->add_option("--window", region_args.window, "Half-width of the scan in both directions")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    region->add_option("--steps", region_args.steps)->capture_default_str()->check(CLI::PositiveNumber);
    region->add_option("--band", region_args.band)->capture_default_str()->check(CLI::NonNegativeNumber);
    region->add_option("--anchors", region_args.anchors)->capture_default_str()->check(CLI::PositiveNumber);
    region->add_option("--threads", region_args.threads, "0: all cores")->capture_default_str();

    ChptArgs chpt_args;
    auto *chpt = app.add_subcommand("chpt", "Pion scattering example");
    chpt->add_option("--l1", chpt_args.l1);
    chpt->add_option("--l2", chpt_args.l2);
    chpt->add_flag("--scan", chpt_args.scan, "Scan [-2,2]^2 and write the region CSV");
    chpt->add_option("--step", chpt_args.step)->capture_default_str();
    chpt->add_option("--threads", chpt_args.threads)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (dims->parsed()) return cmd_dims(rc);
        if (check->parsed()) return cmd_check(rc, check_file, check_fixture);
        if (ray->parsed()) return cmd_ray(rc, ray_args);
        if (sample->parsed()) return cmd_sample(rc, sample_kind, sample_count);
        if (region->parsed()) return cmd_region(rc, region_args);
        if (chpt->parsed()) return cmd_chpt(rc, chpt_args);
    } catch (const SectorError &e) {
        std::cerr << "error: " << e.what() << " (equation " << e.equation() << ")\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
