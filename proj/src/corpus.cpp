#include "taxoadapt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "taxoadapt/errors.hpp"

namespace taxoadapt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string padded_index(std::size_t line_number) {
    std::ostringstream ss;
    ss << "p";
    std::string n = std::to_string(line_number);
    for (std::size_t i = n.size(); i < 6; ++i) ss << '0';
    ss << n;
    return ss.str();
}

}  // namespace

Corpus::Corpus(std::string topic, std::vector<Paper> papers)
    : topic_(std::move(topic)), papers_(std::move(papers)) {
    if (papers_.empty()) throw CorpusError("corpus must contain at least one paper");
    std::set<std::string> ids;
    for (const auto& p : papers_) {
        if (!ids.insert(p.id).second) throw CorpusError("duplicate paper id: " + p.id);
        if (trim(p.title).empty()) throw CorpusError("empty title for paper " + p.id);
        if (trim(p.abstract_text).empty()) throw CorpusError("empty abstract for paper " + p.id);
    }
}

const Paper& Corpus::by_id(const std::string& id) const {
    for (const auto& p : papers_)
        if (p.id == id) return p;
    throw CorpusError("unknown paper id: " + id);
}

Paper& Corpus::by_id(const std::string& id) {
    for (auto& p : papers_)
        if (p.id == id) return p;
    throw CorpusError("unknown paper id: " + id);
}

bool Corpus::classified() const {
    return std::any_of(papers_.begin(), papers_.end(),
                       [](const Paper& p) { return !p.dimensions.empty(); });
}

std::vector<const Paper*> Corpus::dimension_view(Dimension d) const {
    if (!classified())
        throw CorpusError("dimension_view requires dimension classification to have run");
    std::vector<const Paper*> out;
    for (const auto& p : papers_)
        if (p.dimensions.count(d)) out.push_back(&p);
    return out;
}

nlohmann::json Corpus::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : papers_) {
        nlohmann::json jp{{"id", p.id}, {"title", p.title}, {"abstract", p.abstract_text}};
        if (!p.venue_tag.empty()) jp["venue"] = p.venue_tag;
        if (!p.dimensions.empty()) {
            nlohmann::json dims = nlohmann::json::array();
            for (Dimension d : kAllDimensions)
                if (p.dimensions.count(d)) dims.push_back(std::string(dimension_name(d)));
            jp["dimensions"] = dims;
        }
        arr.push_back(std::move(jp));
    }
    return nlohmann::json{{"topic", topic_}, {"papers", arr}};
}

Corpus Corpus::from_json(const nlohmann::json& j) {
    std::vector<Paper> papers;
    for (const auto& jp : j.at("papers")) {
        Paper p;
        p.id = jp.at("id").get<std::string>();
        p.title = jp.at("title").get<std::string>();
        p.abstract_text = jp.at("abstract").get<std::string>();
        if (jp.contains("venue")) p.venue_tag = jp["venue"].get<std::string>();
        if (jp.contains("dimensions")) {
            for (const auto& dn : jp["dimensions"]) {
                auto d = parse_dimension(dn.get<std::string>());
                if (!d) throw CorpusError("unknown dimension in corpus file: " + dn.dump());
                p.dimensions.insert(*d);
            }
        }
        papers.push_back(std::move(p));
    }
    return Corpus(j.at("topic").get<std::string>(), std::move(papers));
}

LoadResult load_corpus(const std::filesystem::path& path, const std::string& topic) {
    std::ifstream in(path);
    if (!in) throw CorpusError("cannot read corpus file: " + path.string());

    std::vector<Paper> papers;
    std::vector<SkippedRecord> skipped;
    std::set<std::string> seen_ids;
    std::set<std::pair<std::string, std::string>> seen_content;

    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;

        nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.is_object()) {
            skipped.push_back({line_number, "malformed JSON"});
            continue;
        }
        std::string title = rec.contains("title") && rec["title"].is_string()
                                ? trim(rec["title"].get<std::string>())
                                : "";
        std::string abstract = rec.contains("abstract") && rec["abstract"].is_string()
                                   ? trim(rec["abstract"].get<std::string>())
                                   : "";
        if (title.empty()) {
            skipped.push_back({line_number, "missing or empty title"});
            continue;
        }
        if (abstract.empty()) {
            skipped.push_back({line_number, "missing or empty abstract"});
            continue;
        }
        if (!seen_content.insert({title, abstract}).second) {
            skipped.push_back({line_number, "duplicate (title, abstract)"});
            continue;
        }

        Paper p;
        p.title = title;
        p.abstract_text = abstract;
        p.id = rec.contains("id") && rec["id"].is_string() && !rec["id"].get<std::string>().empty()
                   ? rec["id"].get<std::string>()
                   : padded_index(line_number);
        if (rec.contains("venue") && rec["venue"].is_string())
            p.venue_tag = rec["venue"].get<std::string>();
        if (!seen_ids.insert(p.id).second) {
            skipped.push_back({line_number, "duplicate id: " + p.id});
            continue;
        }
        papers.push_back(std::move(p));
    }

    if (papers.empty()) throw CorpusError("zero valid records in " + path.string());
    return LoadResult{Corpus(topic, std::move(papers)), std::move(skipped)};
}

nlohmann::json skip_report_json(const std::vector<SkippedRecord>& skipped) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : skipped)
        arr.push_back({{"line", s.line_number}, {"reason", s.reason}});
    return nlohmann::json{{"skipped", arr}, {"count", skipped.size()}};
}

}  // namespace taxoadapt
