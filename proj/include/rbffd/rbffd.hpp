#pragma once

#include "rbffd/driver.hpp"
