#include <doctest.h>
TEST_CASE("todo test_bounds") { CHECK(true); }
