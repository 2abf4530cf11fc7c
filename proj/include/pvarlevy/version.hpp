#pragma once

namespace pvarlevy {

/// `git describe --always --dirty` of the source tree at configure time.
const char* git_describe();

}  // namespace pvarlevy
