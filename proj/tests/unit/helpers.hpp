#pragma once

#include <sstream>
#include <string>

#include "bdparse/model.hpp"

namespace bdparse::testing {

/// Whitespace split only: no punctuation splitting, no masking.
inline TokenSeq seq(const std::string& text) {
    TokenSeq s;
    std::istringstream in(text);
    for (std::string tok; in >> tok;) {
        s.tokens.push_back(tok);
        s.joined.push_back(false);
    }
    return s;
}

inline TokenList tokens(const std::string& text) { return to_template_tokens(seq(text)); }

inline Template tpl(std::uint64_t id, const std::string& text) {
    auto s = seq(text);
    return Template{TemplateId{id}, to_template_tokens(s), s.joined};
}

inline std::string text_of(const TokenList& t) { return render(t); }

}  // namespace bdparse::testing
