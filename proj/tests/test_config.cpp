#include <doctest.h>

#include "p1/config.hpp"
#include "p1/errors.hpp"

using namespace p1;

namespace {

ErrorKind kind_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("flat key = value parsing")
{
    const auto c = parse_config("# comment\node_tol = 1e-10\n\nN_series=120  # trailing\nout_dir = /tmp/x\nseed = 7\n");
    CHECK(c.ode_tol == 1e-10);
    CHECK(c.N_series == 120);
    CHECK(c.out_dir == "/tmp/x");
    CHECK(c.seed == 7);
    CHECK(c.quad_tol == RunConfig{}.quad_tol);
}

TEST_CASE("strictness")
{
    CHECK(kind_of("colour = red\n") == ErrorKind::ConfigError);
    CHECK(kind_of("ode_tol = 1e-9\node_tol = 1e-8\n") == ErrorKind::ConfigError);
    CHECK(kind_of("ode_tol = fast\n") == ErrorKind::ConfigError);
    CHECK(kind_of("N_series = 12.5\n") == ErrorKind::ConfigError);
    CHECK(kind_of("ode_tol = -1\n") == ErrorKind::ConfigError);
    CHECK(kind_of("precision = mpfr\n") == ErrorKind::ConfigError);
    CHECK(kind_of("just a line\n") == ErrorKind::ConfigError);
}

TEST_CASE("hash")
{
    RunConfig a, b;
    CHECK(a.hash() == b.hash());
    b.out_dir = "elsewhere";
    CHECK(a.hash() == b.hash());
    b.fit_tol = 2e-3;
    CHECK(a.hash() != b.hash());
    CHECK(parse_config("").canonical() == a.canonical());
}
