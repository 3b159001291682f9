#include <doctest.h>
TEST_CASE("todo test_cli") { CHECK(true); }
