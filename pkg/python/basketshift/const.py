"""basketshift 常量.

该模块定义了检测流水线的默认参数和文本输出格式常量.
"""

# 检测默认参数
DEFAULT_RHO = 0.06
DEFAULT_DELTA_T = 4
DEFAULT_LOG_BASE = 2.0
DEFAULT_TOP_R = 10

# 排名变化 oracle: 参考过去 3 周的均值, 向后看 2 周
RANK_TRAILING_WEEKS = 3
RANK_LOOKAHEAD_WEEKS = 2

# 合成数据
MAX_EMPTY_REDRAWS = 100
ITEM_ID_WIDTH = 3

# 文本输出
FLOAT_DECIMALS = 6
WEIGHT_DECIMALS = 4
NA = "NA"

CSV_HEADER = ("week", "basket_id", "item")
