#include <doctest.h>
TEST_CASE("todo test_mc") { CHECK(true); }
