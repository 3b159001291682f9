#include <doctest.h>
TEST_CASE("todo test_vc") { CHECK(true); }
