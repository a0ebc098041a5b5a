#!/usr/bin/env python3
"""Writes the CNN layer tables under data/networks/.

The tables follow the standard published layer definitions of each network.
Grouped convolutions are expanded to single-tower form, average pooling is
represented as a pooling layer, and residual additions / concatenations
carry no MACs, so they are omitted. Branch layers read an explicit input
tensor and are flagged "branch": true.
"""
import json
import pathlib
import sys


class Builder:
    def __init__(self, name, shape):
        self.name = name
        self.input = list(shape)
        self.shape = list(shape)
        self.layers = []

    @staticmethod
    def _conv_out(shape, k, kernel, stride, pad):
        c, h, w = shape
        return [k, (h + 2 * pad - kernel) // stride + 1, (w + 2 * pad - kernel) // stride + 1]

    def conv(self, name, k, kernel, stride=1, pad=0, relu=True, src=None):
        layer = {"name": name, "kind": "conv", "out_channels": k, "kernel": kernel,
                 "stride": stride, "padding": pad}
        shape = self.shape
        if src is not None:
            layer["input"] = list(src)
            layer["branch"] = True
            shape = list(src)
        self.layers.append(layer)
        self.shape = self._conv_out(shape, k, kernel, stride, pad)
        if relu:
            self.layers.append({"name": name + "_relu", "kind": "relu"})
        return list(self.shape)

    def pool(self, name, window, stride, pad=0, src=None):
        layer = {"name": name, "kind": "maxpool", "window": window, "stride": stride, "padding": pad}
        shape = self.shape
        if src is not None:
            layer["input"] = list(src)
            layer["branch"] = True
            shape = list(src)
        self.layers.append(layer)
        c, h, w = shape
        self.shape = [c, (h + 2 * pad - window) // stride + 1, (w + 2 * pad - window) // stride + 1]
        return list(self.shape)

    def fc(self, name, out, relu=True, src=None):
        layer = {"name": name, "kind": "fc", "out": out}
        if src is not None:
            layer["input"] = list(src)
            layer["branch"] = True
        self.layers.append(layer)
        self.shape = [out, 1, 1]
        if relu:
            self.layers.append({"name": name + "_relu", "kind": "relu"})

    def dump(self):
        return {"name": self.name, "input": self.input, "layers": self.layers}


def vgg16():
    b = Builder("VGG16", [3, 224, 224])
    cfg = [[64, 64], [128, 128], [256, 256, 256], [512, 512, 512], [512, 512, 512]]
    for s, block in enumerate(cfg, 1):
        for i, k in enumerate(block, 1):
            b.conv(f"conv{s}_{i}", k, 3, 1, 1)
        b.pool(f"pool{s}", 2, 2)
    b.fc("fc6", 4096)
    b.fc("fc7", 4096)
    b.fc("fc8", 1000, relu=False)
    return b.dump()


def alexnet():
    b = Builder("AlexNet", [3, 224, 224])
    b.conv("conv1", 96, 11, 4, 2)
    b.pool("pool1", 3, 2)
    b.conv("conv2", 256, 5, 1, 2)
    b.pool("pool2", 3, 2)
    b.conv("conv3", 384, 3, 1, 1)
    b.conv("conv4", 384, 3, 1, 1)
    b.conv("conv5", 256, 3, 1, 1)
    b.pool("pool5", 3, 2)
    b.fc("fc6", 4096)
    b.fc("fc7", 4096)
    b.fc("fc8", 1000, relu=False)
    return b.dump()


def resnet50():
    b = Builder("ResNet-50", [3, 224, 224])
    b.conv("conv1", 64, 7, 2, 3)
    x = b.pool("pool1", 3, 2, 1)
    stages = [(64, 256, 3, 1), (128, 512, 4, 2), (256, 1024, 6, 2), (512, 2048, 3, 2)]
    for s, (mid, out, blocks, stride) in enumerate(stages, 2):
        for i in range(blocks):
            st = stride if i == 0 else 1
            name = f"res{s}{chr(ord('a') + i)}"
            block_in = list(x)
            if i == 0:
                b.conv(name + "_proj", out, 1, st, 0, relu=False, src=block_in)
                b.conv(name + "_1x1a", mid, 1, st, 0, src=block_in)
            else:
                b.conv(name + "_1x1a", mid, 1, 1, 0)
            b.conv(name + "_3x3", mid, 3, 1, 1)
            x = b.conv(name + "_1x1b", out, 1, 1, 0)
    b.pool("avgpool", 7, 1)
    b.fc("fc", 1000, relu=False)
    return b.dump()


def googlenet():
    b = Builder("GoogLeNet", [3, 224, 224])
    b.conv("conv1", 64, 7, 2, 3)
    b.pool("pool1", 3, 2, 1)
    b.conv("conv2_reduce", 64, 1)
    b.conv("conv2", 192, 3, 1, 1)
    x = b.pool("pool2", 3, 2, 1)
    modules = [
        ("3a", 64, 96, 128, 16, 32, 32), ("3b", 128, 128, 192, 32, 96, 64), "pool3",
        ("4a", 192, 96, 208, 16, 48, 64), ("4b", 160, 112, 224, 24, 64, 64),
        ("4c", 128, 128, 256, 24, 64, 64), ("4d", 112, 144, 288, 32, 64, 64),
        ("4e", 256, 160, 320, 32, 128, 128), "pool4",
        ("5a", 256, 160, 320, 32, 128, 128), ("5b", 384, 192, 384, 48, 128, 128),
    ]
    for m in modules:
        if isinstance(m, str):
            x = b.pool(m, 3, 2, 1, src=x)
            continue
        name, c1, r3, c3, r5, c5, pp = m
        src = list(x)
        b.conv(f"inc{name}_1x1", c1, 1, src=src)
        b.conv(f"inc{name}_3x3_reduce", r3, 1, src=src)
        b.conv(f"inc{name}_3x3", c3, 3, 1, 1)
        b.conv(f"inc{name}_5x5_reduce", r5, 1, src=src)
        b.conv(f"inc{name}_5x5", c5, 5, 1, 2)
        b.pool(f"inc{name}_pool", 3, 1, 1, src=src)
        b.conv(f"inc{name}_pool_proj", pp, 1)
        x = [c1 + c3 + c5 + pp, src[1], src[2]]
    b.pool("avgpool", 7, 1, src=x)
    b.fc("fc", 1000, relu=False)
    return b.dump()


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/networks")
    out.mkdir(parents=True, exist_ok=True)
    for fn, net in [("vgg16", vgg16), ("alexnet", alexnet), ("resnet50", resnet50), ("googlenet", googlenet)]:
        (out / f"{fn}.json").write_text(json.dumps(net(), indent=1) + "\n")


if __name__ == "__main__":
    main()
