#include "pvarlevy/version.hpp"

namespace pvarlevy {

const char* git_describe() { return PVARLEVY_GIT_DESCRIBE; }

}  // namespace pvarlevy
