"""bspace - 碰撞参数（b 空间）表象下的光与物质相互作用模拟工具"""

__version__ = "0.1.0"
