#include "corrattack/report.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>
#include <sstream>

namespace corrattack {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

BenchmarkReport summarize(std::string method, std::vector<ImageRecord> records,
                          std::vector<std::size_t> levels, std::size_t budget) {
    BenchmarkReport r;
    r.method = std::move(method);
    std::sort(records.begin(), records.end(),
              [](const ImageRecord& a, const ImageRecord& b) { return a.image_id < b.image_id; });
    r.records = std::move(records);

    std::vector<std::size_t> success_queries;
    for (const auto& rec : r.records) {
        if (!rec.attempted) continue;
        ++r.attempted;
        if (rec.success) success_queries.push_back(rec.queries);
    }
    r.successes = success_queries.size();
    r.success_rate = r.attempted ? static_cast<double>(r.successes) / r.attempted : 0.0;
    std::sort(success_queries.begin(), success_queries.end());
    if (!success_queries.empty()) {
        double sum = 0.0;
        for (auto q : success_queries) sum += static_cast<double>(q);
        r.mean_queries = sum / static_cast<double>(success_queries.size());
        const std::size_t n = success_queries.size();
        r.median_queries = n % 2 ? static_cast<double>(success_queries[n / 2])
                                 : 0.5 * (success_queries[n / 2 - 1] + success_queries[n / 2]);
    }

    if (levels.empty())
        for (std::size_t s = 1; s <= 10; ++s) levels.push_back(budget * s / 10);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (std::size_t level : levels) {
        const auto within = std::count_if(success_queries.begin(), success_queries.end(),
                                          [&](std::size_t q) { return q <= level; });
        r.curve.push_back(
            {level, r.attempted ? static_cast<double>(within) / r.attempted : 0.0});
    }
    return r;
}

std::string report_csv(const BenchmarkReport& report) {
    std::ostringstream os;
    os << "image_id,attempted,success,queries,final_loss,wall_ms\n";
    for (const auto& r : report.records) {
        os << r.image_id << ',' << (r.attempted ? 1 : 0) << ',' << (r.success ? 1 : 0) << ','
           << r.queries << ',' << fmt(r.final_loss) << ','
           << (r.wall_ms ? fmt(*r.wall_ms) : std::string("-")) << '\n';
    }
    return os.str();
}

std::string summary_csv(const std::vector<BenchmarkReport>& reports) {
    std::ostringstream os;
    os << "method,attempted,successes,success_rate,mean_queries,median_queries\n";
    for (const auto& r : reports) {
        os << r.method << ',' << r.attempted << ',' << r.successes << ',' << fmt(r.success_rate)
           << ',' << (r.mean_queries ? fmt(*r.mean_queries) : "-") << ','
           << (r.median_queries ? fmt(*r.median_queries) : "-") << '\n';
    }
    return os.str();
}

std::string report_json(const std::vector<BenchmarkReport>& reports) {
    using nlohmann::json;
    json out;
    out["queries_note"] =
        "mean and median queries are over successful attacks only and include the initial "
        "classification query";
    json methods = json::array();
    for (const auto& r : reports) {
        json m;
        m["method"] = r.method;
        m["attempted"] = r.attempted;
        m["successes"] = r.successes;
        m["success_rate"] = r.success_rate;
        m["mean_queries"] = r.mean_queries ? json(*r.mean_queries) : json(nullptr);
        m["median_queries"] = r.median_queries ? json(*r.median_queries) : json(nullptr);
        json curve = json::array();
        for (const auto& p : r.curve) curve.push_back({{"queries", p.level}, {"success_rate", p.success_rate}});
        m["curve"] = std::move(curve);
        json recs = json::array();
        for (const auto& rec : r.records) {
            recs.push_back({{"image_id", rec.image_id},
                            {"attempted", rec.attempted},
                            {"success", rec.success},
                            {"queries", rec.queries},
                            {"final_loss", rec.final_loss},
                            {"wall_ms", rec.wall_ms ? json(*rec.wall_ms) : json(nullptr)}});
        }
        m["images"] = std::move(recs);
        methods.push_back(std::move(m));
    }
    out["methods"] = std::move(methods);
    return out.dump(2) + "\n";
}

}  // namespace corrattack
