//! Sample systems shared by the benchmarks.

pub const TOYAMA: &str = "(VAR x)\n(RULES\n  f(s(0),s(1),x) -> f(x,x,x)\n  h -> 0\n  h -> 1\n)\n";
pub const SWAP: &str = "(RULES\n  f(0) -> g(1)\n  g(1) -> f(0)\n)\n";
pub const SEMI: &str = "(VAR x y)\n(RULES\n  f(g(x,0),y) -> f(g(0,x),h(y))\n)\n";
pub const SELF_LM: &str = "(VAR x)\n(RULES\n  f(x,x) -> f(g(x),h(x))\n  h(x) -> g(x)\n)\n";

pub const SYSTEMS: &[(&str, &str)] = &[
    ("toyama", TOYAMA),
    ("swap", SWAP),
    ("semi", SEMI),
    ("self-lm", SELF_LM),
];
