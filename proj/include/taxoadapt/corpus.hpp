#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taxoadapt/dimensions.hpp"

namespace taxoadapt {

struct Paper {
    std::string id;
    std::string title;
    std::string abstract_text;
    std::set<Dimension> dimensions;  // filled by the dimension classifier
    std::string venue_tag;           // optional free text
};

// One rejected or deduplicated input record.
struct SkippedRecord {
    std::size_t line_number = 0;  // 1-based
    std::string reason;
};

class Corpus {
public:
    Corpus(std::string topic, std::vector<Paper> papers);

    const std::string& topic() const { return topic_; }
    const std::vector<Paper>& papers() const { return papers_; }
    std::vector<Paper>& papers() { return papers_; }
    std::size_t size() const { return papers_.size(); }

    const Paper& by_id(const std::string& id) const;
    Paper& by_id(const std::string& id);

    // Papers whose dimension set contains d, in corpus order.
    // Requires dimension classification to have run (some paper labeled).
    std::vector<const Paper*> dimension_view(Dimension d) const;

    bool classified() const;

    nlohmann::json to_json() const;
    static Corpus from_json(const nlohmann::json& j);

private:
    std::string topic_;
    std::vector<Paper> papers_;
};

struct LoadResult {
    Corpus corpus;
    std::vector<SkippedRecord> skipped;
};

// Reads a line-delimited JSON corpus file (keys: title, abstract, optional id,
// optional venue). Invalid records are collected into the skip report; exact
// (title, abstract) duplicates are dropped. Zero valid records is fatal.
LoadResult load_corpus(const std::filesystem::path& path, const std::string& topic);

nlohmann::json skip_report_json(const std::vector<SkippedRecord>& skipped);

}  // namespace taxoadapt
