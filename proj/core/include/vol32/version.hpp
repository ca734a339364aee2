#pragma once

#define VOL32_VERSION "1.0.0"
