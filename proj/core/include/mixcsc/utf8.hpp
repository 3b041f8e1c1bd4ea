#pragma once

#include <string>
#include <string_view>

#include "mixcsc/types.hpp"

namespace mixcsc {

// Decodes UTF-8 into scalar values. Throws Error(kParse) on malformed input,
// overlong forms, or surrogates.
Text utf8_decode(std::string_view bytes);

std::string utf8_encode(TextView text);
std::string utf8_encode(Char c);

}  // namespace mixcsc
