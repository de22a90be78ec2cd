#include "questforge/llm.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

namespace questforge {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kRoleNames = {"system", "npc", "player",
                                                        "function_return"};
constexpr std::array<std::string_view, 5> kErrorNames = {"timeout", "transport", "auth",
                                                         "protocol", "script"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const PromptMessage* last_with_role(const PromptDocument& doc, Role role) {
    for (auto it = doc.messages.rbegin(); it != doc.messages.rend(); ++it) {
        if (it->role == role) return &*it;
    }
    return nullptr;
}

// The newest non-system message, if it has `role`.
const PromptMessage* latest_if(const PromptDocument& doc, Role role) {
    for (auto it = doc.messages.rbegin(); it != doc.messages.rend(); ++it) {
        if (it->role == Role::system) continue;
        return it->role == role ? &*it : nullptr;
    }
    return nullptr;
}

}  // namespace

std::string_view name_of(Role role) { return kRoleNames[static_cast<std::size_t>(role)]; }

std::optional<Role> parse_role(std::string_view text) {
    for (std::size_t i = 0; i < kRoleNames.size(); ++i)
        if (kRoleNames[i] == text) return static_cast<Role>(i);
    return std::nullopt;
}

std::string_view name_of(LlmErrorKind kind) { return kErrorNames[static_cast<std::size_t>(kind)]; }

std::optional<LlmErrorKind> parse_llm_error_kind(std::string_view text) {
    for (std::size_t i = 0; i < kErrorNames.size(); ++i)
        if (kErrorNames[i] == text) return static_cast<LlmErrorKind>(i);
    return std::nullopt;
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 0xF];
    }
    return out;
}

// --- PromptDocument -------------------------------------------------------------

std::string PromptDocument::render() const {
    std::string out;
    for (const PromptMessage& m : messages) {
        if (!out.empty()) out += '\n';
        switch (m.role) {
            case Role::system: break;
            case Role::player: out += "Player: "; break;
            case Role::npc: out += agent + ": "; break;
            case Role::function_return: out += "Function_Returns: "; break;
        }
        out += m.text;
    }
    return out;
}

json PromptDocument::to_json() const {
    json msgs = json::array();
    for (const PromptMessage& m : messages) msgs.push_back({{"role", name_of(m.role)}, {"text", m.text}});
    return {{"agent", agent}, {"messages", std::move(msgs)}};
}

std::string PromptDocument::digest() const { return sha256_hex(to_json().dump()); }

// --- ScriptedBackend ------------------------------------------------------------

ScriptedBackend::ScriptedBackend(std::vector<ScriptRule> rules, std::optional<std::string> fallback)
    : rules_(std::move(rules)), spent_(rules_.size(), false), fallback_(std::move(fallback)) {}

ScriptedBackend ScriptedBackend::from_json(const json& j) {
    std::vector<ScriptRule> rules;
    try {
        for (const json& r : j.at("rules")) {
            ScriptRule rule;
            const json& m = r.at("match");
            if (m.contains("substring")) {
                rule.match = ScriptRule::Match::substring;
                rule.value = m.at("substring").get<std::string>();
            } else if (m.contains("pattern")) {
                rule.match = ScriptRule::Match::pattern;
                rule.value = m.at("pattern").get<std::string>();
            } else if (m.contains("turn")) {
                rule.match = ScriptRule::Match::turn;
                rule.turn = m.at("turn").get<int>();
            } else {
                throw std::invalid_argument("script rule needs substring, pattern or turn");
            }
            const std::string target = r.value("target", "player");
            if (target == "player") rule.target = ScriptRule::Target::player;
            else if (target == "function_return") rule.target = ScriptRule::Target::function_return;
            else if (target == "system") rule.target = ScriptRule::Target::system;
            else if (target == "document") rule.target = ScriptRule::Target::document;
            else throw std::invalid_argument("unknown script rule target " + target);
            if (r.contains("npc")) rule.npc = r.at("npc").get<std::string>();
            rule.response = r.at("response").get<std::string>();
            rule.once = r.value("once", false);
            rules.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed script: ") + e.what());
    }
    std::optional<std::string> fallback;
    if (j.contains("fallback")) fallback = j.at("fallback").get<std::string>();
    return ScriptedBackend(std::move(rules), std::move(fallback));
}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open script " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("script " + path.string() + " is not JSON: " + e.what());
    }
    return from_json(j);
}

std::string ScriptedBackend::complete(const PromptDocument& doc, const CompletionParams&) {
    ++calls_;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (spent_[i]) continue;
        const ScriptRule& rule = rules_[i];
        if (rule.npc && lower(*rule.npc) != lower(doc.agent)) continue;

        bool hit = false;
        if (rule.match == ScriptRule::Match::turn) {
            hit = rule.turn == calls_;
        } else {
            std::string subject;
            const PromptMessage* m = nullptr;
            switch (rule.target) {
                case ScriptRule::Target::player: m = latest_if(doc, Role::player); break;
                case ScriptRule::Target::function_return:
                    m = latest_if(doc, Role::function_return);
                    break;
                case ScriptRule::Target::system: m = last_with_role(doc, Role::system); break;
                case ScriptRule::Target::document: subject = doc.render(); break;
            }
            if (rule.target != ScriptRule::Target::document) {
                if (m == nullptr) continue;
                subject = m->text;
            }
            if (rule.match == ScriptRule::Match::substring) {
                hit = lower(subject).find(lower(rule.value)) != std::string::npos;
            } else {
                hit = std::regex_search(subject, std::regex(rule.value, std::regex::icase));
            }
        }
        if (!hit) continue;
        if (rule.once) spent_[i] = true;
        return rule.response;
    }
    if (fallback_) return *fallback_;
    throw LlmError(LlmErrorKind::script,
                   "no script rule matched call " + std::to_string(calls_));
}

// --- Tapes ----------------------------------------------------------------------

json TapeEntry::to_json() const {
    json j = {{"digest", digest}};
    if (reply) j["reply"] = *reply;
    if (error) {
        j["error"] = name_of(*error);
        j["message"] = error_message;
    }
    return j;
}

TapeEntry TapeEntry::from_json(const json& j) {
    TapeEntry e;
    e.digest = j.at("digest").get<std::string>();
    if (j.contains("reply")) e.reply = j.at("reply").get<std::string>();
    if (j.contains("error")) {
        e.error = parse_llm_error_kind(j.at("error").get<std::string>());
        if (!e.error) throw std::invalid_argument("unknown error kind in tape");
        e.error_message = j.value("message", "");
    }
    if (!e.reply && !e.error) throw std::invalid_argument("tape entry has neither reply nor error");
    return e;
}

std::vector<TapeEntry> read_tape(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tape " + path.string());
    std::vector<TapeEntry> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            out.push_back(TapeEntry::from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("tape line " + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

RecordingBackend::RecordingBackend(std::shared_ptr<LlmBackend> inner,
                                   std::optional<std::filesystem::path> tape_path)
    : inner_(std::move(inner)) {
    if (tape_path) {
        tape_.emplace(*tape_path, std::ios::app);
        if (!*tape_) throw std::runtime_error("cannot open tape " + tape_path->string());
    }
}

std::string RecordingBackend::complete(const PromptDocument& doc, const CompletionParams& params) {
    TapeEntry entry;
    entry.digest = doc.digest();
    auto append = [&] {
        std::lock_guard lock(mutex_);
        if (tape_) *tape_ << entry.to_json().dump() << '\n' << std::flush;
        entries_.push_back(entry);
    };
    try {
        std::string reply = inner_->complete(doc, params);
        entry.reply = reply;
        append();
        return reply;
    } catch (const LlmError& e) {
        entry.error = e.kind();
        entry.error_message = e.what();
        append();
        throw;
    }
}

std::string ReplayBackend::complete(const PromptDocument& doc, const CompletionParams&) {
    const std::size_t turn = next_ + 1;
    if (next_ >= tape_.size())
        throw ReplayError("tape exhausted at turn " + std::to_string(turn), turn, std::nullopt);
    const TapeEntry& entry = tape_[next_];
    if (entry.digest != doc.digest()) {
        std::string where = "turn " + std::to_string(turn);
        if (entry.seq) where += " (seq " + std::to_string(*entry.seq) + ")";
        throw ReplayError("digest mismatch at " + where, turn, entry.seq);
    }
    ++next_;
    if (entry.error) throw LlmError(*entry.error, entry.error_message);
    return *entry.reply;
}

}  // namespace questforge
