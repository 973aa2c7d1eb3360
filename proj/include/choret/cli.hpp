#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "choret/runtime.hpp"

namespace choret {

// Named builtin/global presets for `run`. "none" is the bare core table;
// "budget20"/"budget5" equip the two-party bookseller session: S gets
// catalog and ship, B gets title, address and the named budget.
// Throws std::invalid_argument for anything else.
Fixture make_fixture(const std::string& name);

// The whole tool behind a testable seam. args excludes argv[0]. Returns the
// exit status: 0 success, 1 parse/projection/difftest failure, 2 runtime
// error or deadlock, 3 usage or I/O. Setting CHORET_FORMAT=json switches
// both streams to one JSON record per line.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace choret
