// One PASS/FAIL line per acceptance criterion; exit status 0 iff all pass.
// Pass --detail to print every individual check, --quick for reduced sizes.

#include "imcl/verify.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv)
{
    bool quick = false, detail = false;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--quick")) quick = true;
        else if (!std::strcmp(argv[i], "--detail")) detail = true;
    }
    bool ok = imcl::verify::run("all", quick, std::cout, detail ? &std::cout : nullptr);
    return ok ? 0 : 1;
}
