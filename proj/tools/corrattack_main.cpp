#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <map>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "corrattack/attack.hpp"
#include "corrattack/benchmark.hpp"
#include "corrattack/bo_probe.hpp"
#include "corrattack/config.hpp"
#include "corrattack/dataset.hpp"
#include "corrattack/diagnostics.hpp"
#include "corrattack/errors.hpp"
#include "corrattack/png_io.hpp"
#include "corrattack/remote_oracle.hpp"
#include "corrattack/result_json.hpp"
#include "corrattack/synthetic_model.hpp"

using namespace corrattack;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitNumerical = 4;

void write_text(const std::string& path, const std::string& body) {
    if (path.empty() || path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << body;
}

struct TargetOptions {
    std::string oracle;
    SyntheticModelOptions model;

    void add(CLI::App* app) {
        app->add_option("--oracle", oracle, "remote logits endpoint (default: $" +
                                                std::string(kOracleUrlEnv) + ")");
        app->add_option("--synthetic", model.kind, "in-process model: linear or mlp")
            ->check(CLI::IsMember({"linear", "mlp"}));
        app->add_option("--model-smoothing", model.smoothing, "blur of the linear weights, in pixels");
        app->add_option("--model-bias", model.bias_scale, "spread of the linear class biases");
        app->add_option("--model-seed", model.seed);
        app->add_option("--classes", model.classes);
    }

    std::unique_ptr<LogitsOracle> make(const Shape& shape, bool synthetic_given) const {
        std::string url = oracle;
        if (url.empty() && !synthetic_given)
            if (const char* env = std::getenv(kOracleUrlEnv)) url = env;
        if (!url.empty()) return std::make_unique<RemoteOracle>(url);
        SyntheticModelOptions o = model;
        o.shape = shape;
        return std::make_unique<SyntheticOracle>(make_synthetic_model(o));
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CorrAttack: black-box adversarial attacks via Bayesian optimisation over a "
                 "contextual bandit"};
    app.require_subcommand(1);

    // attack
    auto* attack = app.add_subcommand("attack", "attack one image");
    std::string image_path, out_path, mode = "flip";
    int label = -1;
    std::optional<int> target;
    double epsilon = 0.05;
    std::size_t budget = 10000;
    std::uint64_t seed = 0;
    TargetOptions attack_target;
    attack->add_option("--image", image_path, "PNG file")->required();
    attack->add_option("--label", label, "true class")->required();
    attack->add_option("--target", target, "target class (targeted attack)");
    attack->add_option("--mode", mode)->check(CLI::IsMember({"diff", "flip"}));
    attack->add_option("--epsilon", epsilon);
    attack->add_option("--budget", budget);
    attack->add_option("--seed", seed);
    attack->add_option("--out", out_path, "result JSON (default: stdout)");
    attack_target.add(attack);

    // bench
    auto* bench = app.add_subcommand("bench", "run a seeded benchmark");
    std::string config_path, out_dir = "bench_out";
    bench->add_option("--config", config_path, "key = value file");
    bench->add_option("--out-dir", out_dir);
    std::map<std::string, std::string> overrides;
    for (const auto& [key, help] : BenchConfig::keys()) {
        bench->add_option_function<std::string>(
            "--" + key, [&overrides, k = key](const std::string& v) { overrides[k] = v; }, help);
    }

    // diagnose
    auto* diagnose = app.add_subcommand("diagnose", "emit diagnostic CSV data");
    diagnose->require_subcommand(1);
    std::string diag_image, diag_out;
    int diag_block = 4;
    double diag_eta = 0.03;
    std::uint64_t diag_seed = 0;
    TargetOptions diag_target;
    auto add_map_options = [&](CLI::App* sub) {
        sub->add_option("--image", diag_image, "PNG file (default: seeded noise 3x32x32)");
        sub->add_option("--block", diag_block);
        sub->add_option("--eta", diag_eta);
        sub->add_option("--seed", diag_seed, "noise image seed");
        sub->add_option("--out", diag_out, "CSV (default: stdout)");
        diag_target.add(sub);
    };
    auto* fdmap = diagnose->add_subcommand("fdmap", "per-block finite differences");
    add_map_options(fdmap);
    auto* changemap = diagnose->add_subcommand("changemap", "difference-map drift after one step");
    add_map_options(changemap);
    auto* borank = diagnose->add_subcommand("borank", "rank of the best action found on smooth fields");
    int rank_h = 14, rank_w = 14, rank_c = 3, rank_seeds = 50;
    double rank_smoothing = 2.0;
    RankProbeConfig rank_cfg;
    borank->add_option("--height", rank_h);
    borank->add_option("--width", rank_w);
    borank->add_option("--channels", rank_c);
    borank->add_option("--smoothing", rank_smoothing, "field blur, in blocks");
    borank->add_option("--seeds", rank_seeds);
    borank->add_option("--fraction", rank_cfg.query_fraction);
    borank->add_option("--out", diag_out, "CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (attack->parsed()) {
            const Image x = load_png(image_path);
            AttackConfig cfg = AttackConfig::defaults(parse_attack_mode(mode));
            cfg.epsilon = epsilon;
            cfg.query_budget = budget;
            cfg.seed = seed;
            cfg.target = target;
            auto oracle = attack_target.make(x.shape(), attack->count("--synthetic") > 0);
            const AttackResult r = run_attack(*oracle, x, label, cfg);
            write_text(out_path, attack_result_json(r));
            std::cerr << (r.success ? "success" : "failure") << " after " << r.queries
                      << " queries (" << r.termination << ")\n";
            return 0;
        }

        if (bench->parsed()) {
            BenchConfig cfg;
            if (!config_path.empty()) cfg = BenchConfig::from_file(config_path);
            if (overrides.count("mode")) cfg.set("mode", overrides["mode"]);
            for (const auto& [k, v] : overrides)
                if (k != "mode") cfg.set(k, v);
            cfg.validate();
            const auto reports = run_benchmark(cfg);
            write_benchmark(reports, out_dir);
            std::cout << summary_csv(reports);
            return 0;
        }

        if (fdmap->parsed() || changemap->parsed()) {
            const Image x = diag_image.empty()
                                ? generate_noise_images(1, kBenchmarkShape, diag_seed).front()
                                : load_png(diag_image);
            const bool synthetic_given =
                fdmap->parsed() ? fdmap->count("--synthetic") > 0 : changemap->count("--synthetic") > 0;
            auto model = diag_target.make(x.shape(), synthetic_given);
            const int label = argmax_class(model->query(x));
            LossOracle oracle(*model, LossSpec::untargeted(label, 0.05));
            const BlockGrid grid = make_grid(x.shape(), diag_block);
            std::ostringstream os;
            os.precision(17);
            if (fdmap->parsed()) {
                const auto map = finite_difference_map(oracle, x, grid, diag_eta);
                os << "i,j,k,difference\n";
                for (std::size_t l = 0; l < map.size(); ++l) {
                    const BlockIndex b = grid.block_at(l);
                    os << b.i << ',' << b.j << ',' << b.k << ',' << map[l] << '\n';
                }
            } else {
                const ChangeMap m = change_map(oracle, x, grid, diag_eta);
                os << "i,j,k,before,after,change,stepped\n";
                for (std::size_t l = 0; l < m.before.size(); ++l) {
                    const BlockIndex b = grid.block_at(l);
                    os << b.i << ',' << b.j << ',' << b.k << ',' << m.before[l] << ','
                       << m.after[l] << ',' << m.change[l] << ',' << (b == m.stepped ? 1 : 0)
                       << '\n';
                }
            }
            write_text(diag_out, os.str());
            return 0;
        }

        if (borank->parsed()) {
            std::ostringstream os;
            os.precision(17);
            os << "seed,queries,query_fraction,normalized_rank\n";
            for (int s = 0; s < rank_seeds; ++s) {
                const RewardField field = smooth_reward_field(rank_h, rank_w, rank_c, rank_smoothing,
                                                              static_cast<std::uint64_t>(s));
                rank_cfg.seed = static_cast<std::uint64_t>(s);
                for (const auto& p : bo_rank_probe(field, rank_cfg).points)
                    os << s << ',' << p.queries << ',' << p.query_fraction << ','
                       << p.normalized_rank << '\n';
            }
            write_text(diag_out, os.str());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const OracleUnavailable& e) {
        std::cerr << "oracle unavailable: " << e.what() << '\n';
        return kExitOracle;
    } catch (const ProtocolError& e) {
        std::cerr << "oracle protocol error: " << e.what() << '\n';
        return kExitOracle;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
