#pragma once

#include <string_view>

// Data files compiled into the library (see data/).
namespace bdparse::assets {

std::string_view default_config();
std::string_view default_lexicon();
std::string_view prompt_template();

}  // namespace bdparse::assets
