#include "taxoadapt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

void finalize(MetricResult& m) {
    if (m.items.empty()) {
        m.defined = false;
        m.aggregate = 0.0;
        return;
    }
    double sum = 0.0;
    for (const auto& it : m.items) sum += it.score;
    m.defined = true;
    m.aggregate = sum / static_cast<double>(m.items.size()) * 100.0;
}

// Runs a batch of judge requests and collects (item_id, score) pairs, sending
// failures to the excluded list.
void run_judged_batch(MetricResult& m, Gateway& judge,
                      const std::vector<CompletionRequest>& reqs,
                      const std::vector<std::string>& item_ids, const std::string& score_field,
                      int parallelism) {
    auto items = judge.complete_batch(reqs, parallelism);
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!items[i].ok()) {
            m.excluded.push_back(item_ids[i]);
            continue;
        }
        const auto& parsed = items[i].result->parsed;
        m.items.push_back({item_ids[i], parsed.at(score_field).get<double>(),
                           parsed.value("rationale", "")});
    }
}

// Relevance verdicts for (node, paper) pairs; used by both paper_relevance
// and coverage.
std::vector<std::optional<int>> judge_relevance_pairs(
    const Taxonomy& tax, const Corpus& corpus, Gateway& judge, const PromptLibrary& prompts,
    const std::vector<std::pair<std::string, std::string>>& node_paper, int parallelism) {
    const PromptTemplate& tmpl = prompts.get("judge_relevance");
    std::vector<CompletionRequest> reqs;
    reqs.reserve(node_paper.size());
    for (const auto& [nid, pid] : node_paper) {
        const TaxoNode& n = tax.node(nid);
        const Paper& p = corpus.by_id(pid);
        CompletionRequest req;
        req.prompt_id = tmpl.id;
        req.schema_id = tmpl.schema_id;
        req.messages = PromptLibrary::render(tmpl, {{"node_label", n.label},
                                                    {"description", n.description},
                                                    {"title", p.title},
                                                    {"abstract", p.abstract_text}});
        req.key = {{"node", n.label}, {"paper", p.id}};
        reqs.push_back(std::move(req));
    }
    auto items = judge.complete_batch(reqs, parallelism);
    std::vector<std::optional<int>> verdicts(items.size());
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i].ok()) verdicts[i] = items[i].result->parsed.at("verdict").get<int>();
    return verdicts;
}

std::vector<std::string> non_root_nodes(const Taxonomy& tax) {
    std::vector<std::string> out;
    for (const auto& id : tax.node_order())
        if (id != tax.root_id()) out.push_back(id);
    return out;
}

}  // namespace

nlohmann::json MetricResult::to_json() const {
    nlohmann::json jitems = nlohmann::json::array();
    for (const auto& it : items)
        jitems.push_back(
            {{"item", it.item_id}, {"score", it.score}, {"rationale", it.rationale}});
    return nlohmann::json{{"name", name},          {"defined", defined},
                          {"aggregate", aggregate}, {"items", jitems},
                          {"excluded", excluded},   {"manifest", manifest}};
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json jm = nlohmann::json::array();
    for (const auto& m : metrics) jm.push_back(m.to_json());
    return nlohmann::json{{"dimension", std::string(dimension_name(dimension))},
                          {"metrics", jm}};
}

const MetricResult& MetricReport::metric(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return m;
    throw std::out_of_range("no metric named " + name);
}

MetricResult path_granularity(const Taxonomy& tax, Gateway& judge, const PromptLibrary& prompts,
                              int parallelism) {
    MetricResult m;
    m.name = "path_granularity";
    const PromptTemplate& tmpl = prompts.get("judge_path");

    std::vector<CompletionRequest> reqs;
    std::vector<std::string> ids;
    for (const auto& nid : non_root_nodes(tax)) {
        std::vector<std::string> path = tax.ancestor_path(nid);
        CompletionRequest req;
        req.prompt_id = tmpl.id;
        req.schema_id = tmpl.schema_id;
        req.messages = PromptLibrary::render(tmpl, {{"path", join(path, " -> ")}});
        req.key = {{"path", path}};
        reqs.push_back(std::move(req));
        ids.push_back(nid);
    }
    run_judged_batch(m, judge, reqs, ids, "verdict", parallelism);
    finalize(m);
    return m;
}

MetricResult sibling_coherence(const Taxonomy& tax, Gateway& judge, const PromptLibrary& prompts,
                               int parallelism) {
    MetricResult m;
    m.name = "sibling_coherence";
    const PromptTemplate& tmpl = prompts.get("judge_siblings");

    std::vector<CompletionRequest> reqs;
    std::vector<std::string> ids;
    for (const auto& nid : tax.node_order()) {
        const TaxoNode& n = tax.node(nid);
        if (n.is_leaf()) continue;
        auto labels = tax.child_labels(nid);
        std::vector<std::string> sorted(labels.begin(), labels.end());
        CompletionRequest req;
        req.prompt_id = tmpl.id;
        req.schema_id = tmpl.schema_id;
        req.messages = PromptLibrary::render(
            tmpl, {{"parent_label", n.label}, {"children", join(sorted, ", ")}});
        req.key = {{"parent", n.label}, {"children", sorted}};
        reqs.push_back(std::move(req));
        ids.push_back(nid);
    }
    run_judged_batch(m, judge, reqs, ids, "score", parallelism);
    finalize(m);
    return m;
}

MetricResult dimension_alignment(const Taxonomy& tax, const std::string& topic, Gateway& judge,
                                 const PromptLibrary& prompts, int parallelism) {
    MetricResult m;
    m.name = "dimension_alignment";
    const PromptTemplate& tmpl = prompts.get("judge_dimension");

    std::vector<CompletionRequest> reqs;
    std::vector<std::string> ids;
    for (const auto& nid : non_root_nodes(tax)) {
        const TaxoNode& n = tax.node(nid);
        CompletionRequest req;
        req.prompt_id = tmpl.id;
        req.schema_id = tmpl.schema_id;
        req.messages = PromptLibrary::render(
            tmpl, {{"node_label", n.label},
                   {"description", n.description},
                   {"dimension", std::string(dimension_name(tax.dimension()))},
                   {"topic", topic}});
        req.key = {{"node", n.label}, {"dimension", std::string(dimension_name(tax.dimension()))}};
        reqs.push_back(std::move(req));
        ids.push_back(nid);
    }
    run_judged_batch(m, judge, reqs, ids, "verdict", parallelism);
    finalize(m);
    return m;
}

MetricResult paper_relevance(const Taxonomy& tax, const Corpus& corpus, Gateway& judge,
                             const PromptLibrary& prompts, int sample_size, std::uint64_t seed,
                             int parallelism) {
    MetricResult m;
    m.name = "paper_relevance";

    // Population: the dimension view (the taxonomy's input papers).
    std::vector<std::string> population;
    for (const Paper* p : corpus.dimension_view(tax.dimension())) population.push_back(p->id);

    std::mt19937_64 rng(seed);
    nlohmann::json manifest_samples = nlohmann::json::object();

    for (const auto& nid : non_root_nodes(tax)) {
        std::vector<std::string> sample;
        if (static_cast<int>(population.size()) <= sample_size) {
            sample = population;
        } else {
            std::sample(population.begin(), population.end(), std::back_inserter(sample),
                        sample_size, rng);
        }
        manifest_samples[nid] = sample;

        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& pid : sample) pairs.emplace_back(nid, pid);
        auto verdicts = judge_relevance_pairs(tax, corpus, judge, prompts, pairs, parallelism);

        int relevant = 0, judged = 0;
        for (const auto& v : verdicts) {
            if (!v) continue;
            ++judged;
            relevant += *v;
        }
        if (judged == 0) {
            m.excluded.push_back(nid);
            continue;
        }
        const double fraction = static_cast<double>(relevant) / judged;
        const double verdict = fraction >= 0.05 ? 1.0 : 0.0;
        std::ostringstream rationale;
        rationale << relevant << "/" << judged << " sampled papers relevant";
        m.items.push_back({nid, verdict, rationale.str()});
    }
    m.manifest = {{"seed", seed}, {"sample_size", sample_size}, {"samples", manifest_samples}};
    finalize(m);
    return m;
}

MetricResult coverage(const Taxonomy& tax, const Corpus& corpus, Gateway& judge,
                      const PromptLibrary& prompts, int parallelism) {
    MetricResult m;
    m.name = "coverage";

    for (const auto& nid : tax.node_order()) {
        const TaxoNode& n = tax.node(nid);
        if (n.is_leaf() || n.mapped_papers.empty()) continue;

        std::vector<std::string> pool(n.mapped_papers.begin(), n.mapped_papers.end());
        std::vector<std::pair<std::string, std::string>> parent_pairs;
        for (const auto& pid : pool) parent_pairs.emplace_back(nid, pid);
        auto parent_verdicts =
            judge_relevance_pairs(tax, corpus, judge, prompts, parent_pairs, parallelism);

        std::vector<std::string> relevant;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (parent_verdicts[i] && *parent_verdicts[i] == 1) relevant.push_back(pool[i]);
        if (relevant.empty()) {
            m.excluded.push_back(nid);
            continue;
        }

        std::vector<std::pair<std::string, std::string>> child_pairs;
        for (const auto& pid : relevant)
            for (const auto& cid : n.children) child_pairs.emplace_back(cid, pid);
        auto child_verdicts =
            judge_relevance_pairs(tax, corpus, judge, prompts, child_pairs, parallelism);

        int covered = 0;
        std::size_t k = 0;
        for (std::size_t i = 0; i < relevant.size(); ++i) {
            bool any = false;
            for (std::size_t c = 0; c < n.children.size(); ++c, ++k)
                if (child_verdicts[k] && *child_verdicts[k] == 1) any = true;
            if (any) ++covered;
        }
        const double fraction = static_cast<double>(covered) / relevant.size();
        std::ostringstream rationale;
        rationale << covered << "/" << relevant.size() << " relevant papers covered";
        m.items.push_back({nid, fraction, rationale.str()});
    }
    finalize(m);
    return m;
}

MetricReport evaluate_taxonomy(const Taxonomy& tax, const Corpus& corpus, Gateway& judge,
                               const PromptLibrary& prompts, int sample_size, std::uint64_t seed,
                               int parallelism) {
    MetricReport report;
    report.dimension = tax.dimension();
    report.metrics.push_back(path_granularity(tax, judge, prompts, parallelism));
    report.metrics.push_back(sibling_coherence(tax, judge, prompts, parallelism));
    report.metrics.push_back(
        dimension_alignment(tax, corpus.topic(), judge, prompts, parallelism));
    report.metrics.push_back(
        paper_relevance(tax, corpus, judge, prompts, sample_size, seed, parallelism));
    report.metrics.push_back(coverage(tax, corpus, judge, prompts, parallelism));
    return report;
}

nlohmann::json cross_dimension_summary(const std::vector<MetricReport>& reports) {
    static const char* names[] = {"path_granularity", "sibling_coherence", "dimension_alignment",
                                  "paper_relevance", "coverage"};
    nlohmann::json summary = nlohmann::json::object();
    for (const char* name : names) {
        std::vector<double> values;
        for (const auto& r : reports) {
            const MetricResult& m = r.metric(name);
            if (m.defined) values.push_back(m.aggregate);
        }
        nlohmann::json entry;
        if (values.empty()) {
            entry = {{"defined", false}};
        } else {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= values.size();
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            var /= values.size();
            entry = {{"defined", true},
                     {"mean", mean},
                     {"stddev", std::sqrt(var)},
                     {"values", values}};
        }
        summary[name] = entry;
    }
    return summary;
}

std::string render_summary_table(const nlohmann::json& summary) {
    std::ostringstream out;
    out << "metric                 mean    stddev\n";
    for (const auto& [name, entry] : summary.items()) {
        out << name;
        for (std::size_t i = name.size(); i < 22; ++i) out << ' ';
        if (entry.value("defined", false)) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%7.2f %8.3f", entry["mean"].get<double>(),
                          entry["stddev"].get<double>());
            out << buf;
        } else {
            out << "      -        -";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace taxoadapt
