#include "corrattack/benchmark.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "corrattack/attack.hpp"
#include "corrattack/errors.hpp"
#include "corrattack/remote_oracle.hpp"
#include "corrattack/synthetic_model.hpp"

namespace corrattack {

OracleFactory make_oracle_factory(const BenchConfig& config) {
    if (!config.oracle.empty()) {
        const std::string url = config.oracle;
        return [url] { return std::make_unique<RemoteOracle>(url); };
    }
    SyntheticModelOptions opts;
    opts.kind = config.model;
    opts.shape = {config.channels, config.image_size, config.image_size};
    opts.classes = config.classes;
    opts.seed = config.model_seed;
    opts.smoothing = config.model_smoothing;
    opts.bias_scale = config.model_bias;
    opts.row_norm = config.model_row_norm;
    auto model = make_synthetic_model(opts);
    return [model] { return std::make_unique<SyntheticOracle>(model); };
}

std::vector<Sample> prepare_dataset(const BenchConfig& config, const OracleFactory& oracles) {
    if (config.dataset != "synthetic") {
        DatasetOptions opts;
        opts.size = config.image_size;
        if (config.oracle.empty()) opts.num_classes = config.classes;
        return load_dataset(config.dataset, config.labels, opts);
    }
    const Shape shape{config.channels, config.image_size, config.image_size};
    const auto images = generate_noise_images(config.synthetic_count, shape, config.dataset_seed);
    auto oracle = oracles();
    std::vector<Sample> out;
    out.reserve(images.size());
    for (std::size_t n = 0; n < images.size(); ++n) {
        char id[32];
        std::snprintf(id, sizeof id, "img_%03zu", n);
        out.push_back({id, images[n], argmax_class(oracle->query(images[n])), std::nullopt});
    }
    return out;
}

BenchmarkReport run_method(const std::string& method, const std::vector<Sample>& samples,
                           const OracleFactory& oracles, const BenchConfig& config) {
    std::vector<ImageRecord> records(samples.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t n = next.fetch_add(1);
            if (n >= samples.size()) return;
            try {
                const Sample& s = samples[n];
                ImageRecord& rec = records[n];
                rec.image_id = s.id;

                auto probe = oracles();
                const auto clean = probe->query(s.image);
                rec.final_loss = config.attack.loss_spec(s.label).loss(clean);
                const bool has_target = s.target || config.attack.target;
                const int target = s.target ? *s.target : config.attack.target.value_or(-1);
                if (argmax_class(clean) != s.label || (has_target && target == s.label)) continue;

                AttackConfig ac = config.attack;
                ac.seed = config.attack.seed ^ static_cast<std::uint64_t>(n);
                if (s.target) ac.target = s.target;
                auto oracle = oracles();
                const auto t0 = std::chrono::steady_clock::now();
                const AttackResult r = method == "random"
                                           ? random_block_baseline(*oracle, s.image, s.label, ac)
                                           : run_attack(*oracle, s.image, s.label, ac);
                const auto t1 = std::chrono::steady_clock::now();
                rec.attempted = true;
                rec.success = r.success;
                rec.queries = r.queries;
                rec.final_loss = r.final_loss;
                if (config.record_timing)
                    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = samples.size();
                return;
            }
        }
    };

    const std::size_t count = std::min(config.workers, std::max<std::size_t>(samples.size(), 1));
    if (count <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < count; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return summarize(method, std::move(records), config.curve_levels, config.attack.query_budget);
}

std::vector<BenchmarkReport> run_benchmark(const BenchConfig& config) {
    config.validate();
    const OracleFactory oracles = make_oracle_factory(config);
    const std::vector<Sample> samples = prepare_dataset(config, oracles);
    std::vector<BenchmarkReport> reports;
    for (const auto& m : config.methods) reports.push_back(run_method(m, samples, oracles, config));
    return reports;
}

void write_benchmark(const std::vector<BenchmarkReport>& reports, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (fs::path(out_dir) / name).string());
        out << body;
    };
    for (const auto& r : reports) write(r.method + ".csv", report_csv(r));
    write("summary.csv", summary_csv(reports));
    write("report.json", report_json(reports));
}

}  // namespace corrattack
