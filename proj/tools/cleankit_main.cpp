// cleankit command line: load instances, run schedules and verifier suites,
// compute balayage, classify clouds, run the converse battery, emit CSV/JSON.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cleankit/io.hpp"

namespace {

using namespace cleankit;

struct CommonArgs {
    std::string instance_path;
    std::string gallery_name;
    std::vector<std::string> gallery_params;
    std::vector<std::string> lambda_sites;
    std::string out_path;
    std::string config_path;
    std::uint64_t seed = 1;
    double tol = 1e-10;
    int level_cap = 4;
    long steps = 200;
    std::string schedule = "round_robin";
};

GalleryParams parse_params(const std::vector<std::string>& kvs) {
    GalleryParams p;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw contract_error("--param expects key=value, got '" + kv + "'");
        p[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return p;
}

struct Loaded {
    std::shared_ptr<const SiteSpace> space;
    Kernel alpha;
    DirtVector c;
    WeightVector w;
    SiteSet lambda;
    std::optional<Cloud> cloud;
    std::optional<Schedule> schedule;
    json config;

    Loaded(std::shared_ptr<const SiteSpace> sp, Kernel a)
        : space(sp), alpha(std::move(a)), c(sp, 0.0), w(sp, 1.0), lambda(sp->size()) {}
};

Loaded load_instance(const CommonArgs& args) {
    json config;
    config["seed"] = args.seed;
    if (!args.gallery_name.empty()) {
        GalleryParams p = parse_params(args.gallery_params);
        GalleryInstance g = build_gallery(args.gallery_name, p);
        config["gallery"] = args.gallery_name;
        for (const auto& [k, v] : p) config["params"][k] = v;
        Loaded l(g.space, std::move(g.alpha));
        l.c = std::move(g.c);
        l.w = std::move(g.w);
        l.lambda = g.lambda;
        l.cloud = std::move(g.cloud);
        l.schedule = std::move(g.schedule);
        l.config = std::move(config);
        return l;
    }
    if (args.instance_path.empty())
        throw contract_error("provide --instance <file.json> or --gallery <name>");
    std::ifstream in(args.instance_path);
    if (!in) throw contract_error("cannot open instance file '" + args.instance_path + "'");
    json doc = json::parse(in);
    config["instance"] = args.instance_path;
    InstanceDoc d = instance_from_json(doc);
    Loaded l(d.space, std::move(d.alpha));
    l.c = std::move(d.c);
    l.w = std::move(d.w);
    l.lambda = d.lambda;
    l.cloud = std::move(d.cloud);
    l.config = std::move(config);
    return l;
}

void apply_lambda_override(Loaded& l, const CommonArgs& args) {
    if (args.lambda_sites.empty()) return;
    SiteSet s(l.space->size());
    for (const auto& label : args.lambda_sites) s.insert(l.space->index(label));
    l.lambda = s;
    l.config["lambda"] = args.lambda_sites;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw contract_error("cannot open output file '" + out_path + "'");
        out << text;
    }
}

void merge_config_file(CommonArgs& args) {
    if (args.config_path.empty()) return;
    std::ifstream in(args.config_path);
    if (!in) throw contract_error("cannot open config file '" + args.config_path + "'");
    json cfg = json::parse(in);
    // config file overrides flags
    if (cfg.contains("instance")) args.instance_path = cfg["instance"].get<std::string>();
    if (cfg.contains("gallery")) args.gallery_name = cfg["gallery"].get<std::string>();
    if (cfg.contains("params"))
        for (auto it = cfg["params"].begin(); it != cfg["params"].end(); ++it)
            args.gallery_params.push_back(it.key() + "=" + std::to_string(it.value().get<double>()));
    if (cfg.contains("lambda")) args.lambda_sites = cfg["lambda"].get<std::vector<std::string>>();
    if (cfg.contains("seed")) args.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("tol")) args.tol = cfg["tol"].get<double>();
    if (cfg.contains("level_cap")) args.level_cap = cfg["level_cap"].get<int>();
    if (cfg.contains("steps")) args.steps = cfg["steps"].get<long>();
    if (cfg.contains("schedule")) args.schedule = cfg["schedule"].get<std::string>();
    if (cfg.contains("out")) args.out_path = cfg["out"].get<std::string>();
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--instance", args.instance_path, "instance JSON file");
    cmd->add_option("--gallery", args.gallery_name, "gallery family name");
    cmd->add_option("--param", args.gallery_params, "gallery parameter key=value (repeatable)");
    cmd->add_option("--lambda", args.lambda_sites, "sites of lambda (repeatable; default: instance's)");
    cmd->add_option("--schedule", args.schedule, "round_robin | full_sweep | gallery");
    cmd->add_option("--steps", args.steps, "schedule steps to run");
    cmd->add_option("--tol", args.tol, "tolerance");
    cmd->add_option("--level-cap", args.level_cap, "marker level cap");
    cmd->add_option("--seed", args.seed, "random seed (recorded in outputs)");
    cmd->add_option("--out", args.out_path, "output file (stdout when absent)");
    cmd->add_option("--config", args.config_path, "config JSON; overrides flags");
}

int cmd_clean(CommonArgs args) {
    merge_config_file(args);
    Loaded l = load_instance(args);
    apply_lambda_override(l, args);

    Schedule sched = [&]() {
        if (args.schedule == "gallery") {
            if (!l.schedule) throw contract_error("instance carries no schedule");
            return *l.schedule;
        }
        if (args.schedule == "full_sweep") {
            std::vector<Profile> steps = {Profile::indicator(l.space, l.lambda)};
            return Schedule::of_profiles(l.lambda, std::move(steps));
        }
        return round_robin_schedule(l.lambda);
    }();

    RunOptions opts;
    opts.n_steps = args.steps;
    opts.seed = args.seed;
    BalayageResult pi = balayage(l.alpha, l.lambda, l.w, args.tol);
    if (pi.converged) opts.balayage = &pi;
    ConvergenceTrace trace = run_schedule(l.c, sched, l.alpha, l.w, opts);

    std::string csv = trace_to_csv(trace);
    csv.insert(csv.find('\n') + 1, "# config=" + config_digest(l.config) + "\n");
    emit(args.out_path, csv);
    return pi.converged ? 0 : 3;
}

int cmd_balayage(CommonArgs args) {
    merge_config_file(args);
    Loaded l = load_instance(args);
    apply_lambda_override(l, args);
    BalayageResult res = balayage(l.alpha, l.lambda, l.w, args.tol);
    json out = balayage_to_json(res);
    out["config_digest"] = config_digest(l.config);
    emit(args.out_path, out.dump(2));
    return res.converged ? 0 : 3;
}

int cmd_verify(CommonArgs args, std::vector<std::string> names, int trials) {
    merge_config_file(args);
    json out;
    json cfg;
    cfg["names"] = names;
    cfg["trials"] = trials;
    cfg["seed"] = args.seed;
    out["config_digest"] = config_digest(cfg);
    out["reports"] = json::array();

    auto ids = identity_names();
    auto ineqs = inequality_names();
    auto clouds = cloud_identity_names();
    std::vector<std::string> matrix_names, cloud_names;
    if (names.empty() || (names.size() == 1 && names[0] == "all")) {
        matrix_names = ids;
        matrix_names.insert(matrix_names.end(), ineqs.begin(), ineqs.end());
        cloud_names = clouds;
    } else {
        for (const auto& n : names) {
            if (std::find(clouds.begin(), clouds.end(), n) != clouds.end())
                cloud_names.push_back(n);
            else
                matrix_names.push_back(n);
        }
    }

    bool all_pass = true;
    if (!matrix_names.empty()) {
        InstanceOptions opts;
        for (const auto& r : run_verifier_suite(matrix_names, trials, args.seed, opts)) {
            all_pass = all_pass && r.pass;
            out["reports"].push_back(report_to_json(r));
        }
    }
    if (!cloud_names.empty()) {
        CloudInstanceOptions opts;
        opts.level_cap = args.level_cap;
        for (const auto& r : run_cloud_suite(cloud_names, trials, args.seed, opts)) {
            all_pass = all_pass && r.pass;
            out["reports"].push_back(report_to_json(r));
        }
    }
    out["all_pass"] = all_pass;
    emit(args.out_path, out.dump(2));
    return all_pass ? 0 : 3;
}

int cmd_classify(CommonArgs args) {
    merge_config_file(args);
    Loaded l = load_instance(args);
    apply_lambda_override(l, args);
    if (!l.cloud) throw contract_error("classify: instance carries no cloud");
    CloudClassReport rep = classify(*l.cloud, l.lambda);
    json out = classify_to_json(rep, *l.space);
    out["config_digest"] = config_digest(l.config);
    emit(args.out_path, out.dump(2));
    return 0;
}

int cmd_battery(CommonArgs args) {
    merge_config_file(args);
    Loaded l = load_instance(args);
    apply_lambda_override(l, args);
    BatteryOptions opts;
    opts.seed = args.seed;
    BatteryReport rep = converse_battery(l.alpha, l.lambda, l.c, l.w, opts);
    json out = battery_to_json(rep);
    out["config_digest"] = config_digest(l.config);
    emit(args.out_path, out.dump(2));
    return 0;
}

int cmd_examples(CommonArgs args, const std::string& mode, const std::string& name) {
    merge_config_file(args);
    std::string family = !name.empty() ? name : args.gallery_name;
    if (mode == "list" || (mode.empty() && family.empty())) {
        json out = gallery_names();
        emit(args.out_path, out.dump(2));
        return 0;
    }
    if (family.empty()) throw contract_error("examples build: missing family name");
    GalleryInstance g = build_gallery(family, parse_params(args.gallery_params));
    json out = gallery_to_json(g);
    json cfg;
    cfg["gallery"] = family;
    out["config_digest"] = config_digest(cfg);
    emit(args.out_path, out.dump(2));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cleaning-operator / balayage toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<std::string> verify_names;
    int trials = 20;
    std::string examples_mode;
    std::string examples_name;

    CLI::App* clean = app.add_subcommand("clean", "run a cleaning schedule, emit a CSV trace");
    add_common(clean, args);
    CLI::App* bal = app.add_subcommand("balayage", "truncated balayage with certified tail");
    add_common(bal, args);
    CLI::App* verify = app.add_subcommand("verify", "run identity/inequality verifier suites");
    add_common(verify, args);
    verify->add_option("--name", verify_names, "verifier names (default: all)");
    verify->add_option("--trials", trials, "random instances per verifier");
    CLI::App* classify_cmd = app.add_subcommand("classify", "classify a cloud");
    add_common(classify_cmd, args);
    CLI::App* battery = app.add_subcommand("battery", "converse-condition truth table");
    add_common(battery, args);
    CLI::App* examples = app.add_subcommand("examples", "list or build gallery instances");
    add_common(examples, args);
    examples->add_option("mode", examples_mode, "list | build")
        ->check(CLI::IsMember({"list", "build"}));
    examples->add_option("name", examples_name, "family to build");

    CLI11_PARSE(app, argc, argv);

    try {
        if (clean->parsed()) return cmd_clean(args);
        if (bal->parsed()) return cmd_balayage(args);
        if (verify->parsed()) return cmd_verify(args, verify_names, trials);
        if (classify_cmd->parsed()) return cmd_classify(args);
        if (battery->parsed()) return cmd_battery(args);
        if (examples->parsed()) return cmd_examples(args, examples_mode, examples_name);
    } catch (const cleankit::contract_error& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return 2;
    } catch (const cleankit::dimension_error& e) {
        std::cerr << "dimension error: " << e.what() << "\n";
        return 2;
    } catch (const cleankit::nonconvergence_error& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 3;
    } catch (const cleankit::iteration_error& e) {
        std::cerr << "iteration limit: " << e.what() << " bracket [" << e.lower << ", " << e.upper
                  << "]\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
