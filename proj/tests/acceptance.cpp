#include <iostream>

#include "acceptance.hpp"

int main()
{
    const auto r = p1::run_acceptance([](const p1::CheckLine& c) { std::cout << p1::format_line(c) << std::endl; });
    int fails = 0;
    for (const auto& l : r.lines)
        fails += !l.info && !l.pass;
    std::cout << (fails ? std::to_string(fails) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return fails ? 1 : 0;
}
