#pragma once

namespace sic {

/// Exit codes: 0 success, 2 usage or configuration error, 3 numerical abort.
int cli_main(int argc, const char* const* argv);

}  // namespace sic
