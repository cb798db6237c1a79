#pragma once

#define KRAMERS1D_VERSION "0.1.0"
