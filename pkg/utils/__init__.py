"""工具模块：强度帧导出等与物理计算无关的辅助功能"""
