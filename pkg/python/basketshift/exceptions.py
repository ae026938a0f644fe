"""basketshift 异常类.

该模块为 basketshift 定义了异常层次结构.
"""


class ShiftError(Exception):
    """所有 basketshift 异常的基类."""

    pass


class ParseError(ShiftError):
    """输入文本无法解析时抛出.

    Case:
        - CSV 表头不是 `week,basket_id,item`.
        - 行的列数不对, 或 week 不是十进制整数.
        - JSONL 行不是合法 JSON 或字段类型不符.
    """

    def __init__(self, msg: str, line: int | None = None) -> None:
        """初始化解析错误.

        Args:
            msg: 错误描述信息.
            line: 出错的行号 (从 1 开始).
        """
        super().__init__(msg)
        self.line = line

    def __str__(self) -> str:
        base_msg = super().__str__()
        if self.line is not None:
            return f"{base_msg} (at line {self.line})"
        return base_msg


class ShiftValueError(ShiftError, ValueError):
    """值无效时抛出 (如空输入, 非正周序号, 维度不一致)."""

    pass


class ParameterError(ShiftValueError):
    """检测参数越界时抛出 (rho, delta_t, theta_r, log_base, R)."""

    pass


class WeekRangeError(ShiftValueError):
    """周序号超出 `[1, T]` 时抛出."""

    pass


class GenerationError(ShiftError):
    """合成数据生成失败时抛出.

    通常表示某个篮子重抽 100 次后仍为空 (p_in 与上下文规模过小).
    """

    pass
