#include <cctype>
#include <optional>

#include "questforge/registry.hpp"

namespace questforge {

namespace {

constexpr std::string_view kMarker = "Function:";

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

// Recursive-descent reader for the pseudo-JSON models emit after
// "Function:". Strings may use either quote style.
class BlockReader {
public:
    BlockReader(std::string_view text, std::size_t pos) : text_(text), pos_(pos) {}

    std::size_t pos() const { return pos_; }

    std::optional<std::vector<FunctionCall>> read_list() {
        skip_ws();
        if (!eat('[')) return fail("expected '['");
        std::vector<FunctionCall> calls;
        skip_ws();
        if (eat(']')) return calls;
        for (;;) {
            auto call = read_object();
            if (!call) return std::nullopt;
            calls.push_back(std::move(*call));
            skip_ws();
            if (eat(']')) return calls;
            if (!eat(',')) return fail("expected ',' or ']' between calls");
            skip_ws();
        }
    }

    const std::string& error() const { return error_; }

private:
    std::optional<FunctionCall> read_object() {
        skip_ws();
        if (!eat('{')) return fail_call("expected '{'");
        FunctionCall call;
        bool have_name = false;
        skip_ws();
        if (eat('}')) return fail_call("call without a name");
        for (;;) {
            skip_ws();
            auto key = read_string();
            if (!key) return std::nullopt;
            skip_ws();
            if (!eat(':')) return fail_call("expected ':' after key");
            skip_ws();
            if (*key == "name") {
                auto name = read_string();
                if (!name) return std::nullopt;
                call.name = std::move(*name);
                have_name = true;
            } else if (*key == "arguments") {
                auto args = read_string_list();
                if (!args) return std::nullopt;
                call.arguments = std::move(*args);
            } else {
                return fail_call("unexpected key '" + *key + "'");
            }
            skip_ws();
            if (eat('}')) break;
            if (!eat(',')) return fail_call("expected ',' or '}' in call");
        }
        if (!have_name) return fail_call("call without a name");
        return call;
    }

    std::optional<std::vector<std::string>> read_string_list() {
        if (!eat('[')) {
            error_ = "expected '[' for arguments";
            return std::nullopt;
        }
        std::vector<std::string> out;
        skip_ws();
        if (eat(']')) return out;
        for (;;) {
            skip_ws();
            auto s = read_string();
            if (!s) return std::nullopt;
            out.push_back(std::move(*s));
            skip_ws();
            if (eat(']')) return out;
            if (!eat(',')) {
                error_ = "expected ',' or ']' in arguments";
                return std::nullopt;
            }
        }
    }

    std::optional<std::string> read_string() {
        if (pos_ >= text_.size() || (text_[pos_] != '\'' && text_[pos_] != '"')) {
            error_ = "expected a quoted string";
            return std::nullopt;
        }
        const char quote = text_[pos_++];
        std::string out;
        while (pos_ < text_.size()) {
            const char c = text_[pos_++];
            if (c == quote) return out;
            if (c == '\\') {
                if (pos_ >= text_.size()) break;
                const char e = text_[pos_++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    default: out += e; break;
                }
                continue;
            }
            if (c == '\n') break;
            out += c;
        }
        error_ = "unterminated string";
        return std::nullopt;
    }

    void skip_ws() {
        while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
    }

    bool eat(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::nullopt_t fail(std::string message) {
        error_ = std::move(message);
        return std::nullopt;
    }
    std::optional<FunctionCall> fail_call(std::string message) {
        error_ = std::move(message);
        return std::nullopt;
    }

    std::string_view text_;
    std::size_t pos_;
    std::string error_;
};

// End of a malformed block: the bracket that closes the list if quotes and
// brackets balance before the end of the line, otherwise the end of the line.
std::size_t malformed_extent(std::string_view text, std::size_t from) {
    const std::size_t eol = std::min(text.find('\n', from), text.size());
    int depth = 0;
    char quote = 0;
    for (std::size_t i = from; i < eol; ++i) {
        const char c = text[i];
        if (quote != 0) {
            if (c == '\\') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == '[' || c == '{') {
            ++depth;
        } else if (c == ']' || c == '}') {
            if (--depth <= 0) return i + 1;
        }
    }
    return eol;
}

void append_segment(std::string& speech, std::string_view segment) {
    segment = trim(segment);
    if (segment.empty()) return;
    if (!speech.empty()) speech += ' ';
    speech += segment;
}

std::string quote(std::string_view s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\\' || c == '\'') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    out += '\'';
    return out;
}

}  // namespace

ParsedOutput parse_npc_output(std::string_view raw) {
    ParsedOutput out;
    std::size_t cursor = 0;
    for (;;) {
        const std::size_t at = raw.find(kMarker, cursor);
        if (at == std::string_view::npos) {
            append_segment(out.speech, raw.substr(cursor));
            break;
        }
        append_segment(out.speech, raw.substr(cursor, at - cursor));

        BlockReader reader(raw, at + kMarker.size());
        if (auto calls = reader.read_list()) {
            for (auto& c : *calls) out.calls.push_back(std::move(c));
            cursor = reader.pos();
        } else {
            out.warnings.push_back({at, "malformed function block: " + reader.error()});
            cursor = malformed_extent(raw, at + kMarker.size());
        }
    }
    return out;
}

std::string format_calls(const std::vector<FunctionCall>& calls) {
    std::string out = "Function: [";
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (i > 0) out += ", ";
        out += "{'name':" + quote(calls[i].name) + ", 'arguments': [";
        for (std::size_t a = 0; a < calls[i].arguments.size(); ++a) {
            if (a > 0) out += ", ";
            out += quote(calls[i].arguments[a]);
        }
        out += "]}";
    }
    out += ']';
    return out;
}

std::string format_call(const FunctionCall& call) { return format_calls({call}); }

}  // namespace questforge
