#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace taxoadapt {

struct PromptTemplate {
    std::string id;
    std::string version;
    std::string schema_id;
    std::string system_text;  // {{var}} placeholders
    std::string user_text;
};

struct Message {
    std::string role;  // "system" | "user"
    std::string text;
};

// Versioned prompt templates. Defaults are compiled in; a JSON template file
// can override any subset (audited, swappable wording).
class PromptLibrary {
public:
    static PromptLibrary builtin();

    // Overrides entries from a JSON file: {"prompts":[{id,version,schema,system,user}]}.
    void load_overrides(const std::filesystem::path& path);

    const PromptTemplate& get(const std::string& id) const;

    static std::vector<Message> render(const PromptTemplate& t,
                                       const std::map<std::string, std::string>& vars);

private:
    std::map<std::string, PromptTemplate> templates_;
};

}  // namespace taxoadapt
