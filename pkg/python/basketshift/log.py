"""basketshift 日志记录器."""

import logging
from collections.abc import Sequence

logger = logging.getLogger("basketshift")


def get_line_context(lines: Sequence[str], lineno: int, window: int = 1) -> str:
    """获取指定行周围的输入文本, 用于解析错误诊断.

    Args:
        lines: 输入的全部行 (不含换行符).
        lineno: 出错行号 (从 1 开始).
        window: 前后各显示的行数.

    Returns:
        带行号前缀的上下文文本, 出错行以 `>` 标记.
    """
    start = max(1, lineno - window)
    end = min(len(lines), lineno + window)

    out = [f"第 {lineno} 行的上下文 (显示 {start}-{end}):"]
    for no in range(start, end + 1):
        mark = ">" if no == lineno else " "
        out.append(f"{mark} {no:>5} | {lines[no - 1]}")
    return "\n".join(out)
