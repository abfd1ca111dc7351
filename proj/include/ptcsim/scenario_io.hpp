#pragma once

#include "ptcsim/scenario.hpp"

#include <string>

namespace ptcsim {

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Plain-text scenario format:
//
//   # comment
//   [scenario]              label = ..., archetype = stable|qss_difficulty|unstable
//   [network]               base_mva = ..., f_base = ...
//   [buses]                 <name> kind=slack|pv|pq v=.. theta=.. g=.. b=..
//   [lines]                 <name> from=.. to=.. r=.. x=.. b=.. status=0|1
//   [generators]            <name> bus=.. p=.. h=.. d=.. xd=.. xq=.. xdp=.. xqp=.. td0p=.. tq0p=..
//   [exciters]              <name> gen=.. ka=.. ta=..
//   [governors]             <name> gen=.. r=.. tg=..
//   [loads]                 <name> bus=.. kind=erl|static p0=.. q0=.. tp=.. tq=..
//                                  alpha_s=.. alpha_t=.. beta_s=.. beta_t=..
//   [ltcs]                  <name> from=.. to=.. x=.. ratio=.. ratio_min=.. ratio_max=..
//                                  step=.. v_ref=.. deadband=.. delay=..
//   [oxls]                  <name> gen=.. i_lim=.. efd_lim=.. pickup=.. t_reset=.. sharpness=..
//   [fault]                 line = .., t_fault = ..
//   [plan]                  t0, t1, t_end, h, newton_tol, newton_max_iters, delta0,
//                           delta_max, f_tol, max_iters, max_delta_shrink
//
// Omitted keys keep their defaults except element references (bus, gen, from, to),
// which are required. Unknown sections and keys are errors.
Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario(const std::string& path);

std::string write_scenario(const Scenario& sc);

}  // namespace ptcsim
