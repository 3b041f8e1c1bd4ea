#!/usr/bin/env python3
"""Generates the desk-scale clean Chinese corpus from a small template grammar.

Usage: gen_corpus.py --seed 1 --count 4000 > data/corpus/train.txt
"""
import argparse
import random

SUBJECTS = ["我", "你", "他", "她", "我们", "你们", "他们", "老师", "同学们", "妈妈", "爸爸",
            "哥哥", "姐姐", "弟弟", "妹妹", "爷爷", "奶奶", "小明", "小红", "王老师", "李医生",
            "张经理", "我的朋友", "邻居", "司机", "学生们", "校长", "记者", "警察", "孩子们"]
TIMES = ["今天", "明天", "昨天", "后天", "今天早上", "明天下午", "昨天晚上", "周末", "星期一",
         "每天", "上个月", "下个星期", "现在", "刚才", "中午", "晚上", "早上", "去年", "今年夏天", "寒假"]
PLACES = ["学校", "图书馆", "公园", "医院", "超市", "银行", "火车站", "飞机场", "饭馆", "办公室",
          "教室", "电影院", "博物馆", "体育馆", "商店", "家里", "公司", "邮局", "书店", "市场"]
ACTIVITIES = ["看书", "写作业", "买东西", "吃饭", "上课", "开会", "看电影", "打篮球", "踢足球",
              "游泳", "跑步", "学习汉语", "复习功课", "参观展览", "借书", "看病", "工作", "休息",
              "喝咖啡", "听音乐", "唱歌", "跳舞", "画画", "练习书法", "准备考试", "写信", "取钱",
              "包水饺", "做实验", "打电话"]
ADJ_OBJECTS = ["这本书", "那部电影", "这个问题", "今天的考试", "这家饭馆的菜", "他的想法",
               "新的工作", "这个城市", "那次旅行", "学校的环境", "这首歌", "他的汉字",
               "这次比赛", "外面的风景", "这个办法"]
DEGREES = ["很", "非常", "特别", "有点儿", "比较", "真", "太", "相当"]
ADJECTIVES = ["好", "有意思", "难", "容易", "重要", "漂亮", "干净", "热闹", "安静", "方便",
              "复杂", "简单", "精彩", "清楚", "舒服", "奇怪", "认真", "正确"]
WEATHER = ["天气", "气温", "风", "雨", "阳光"]
WEATHER_ADJ = ["很好", "不错", "很冷", "很热", "很大", "特别好", "比较暖和", "有点儿凉"]
ADVICE = ["记得多穿衣服", "出门要带雨伞", "我们去公园散步吧", "最好在家休息",
          "适合出去旅游", "大家注意安全", "别忘了喝水", "早点儿回家睡觉"]
REASONS = ["身体不舒服", "工作太忙", "下大雨了", "路上堵车", "起床太晚", "没有时间",
           "作业太多", "钱包丢了", "生病了", "忘带钥匙"]
RESULTS = ["没有去上课", "迟到了", "只好在家休息", "没能参加比赛", "去医院看病了",
           "晚上才回家", "请了一天假", "给老师打了电话", "错过了火车", "心情不太好"]
OBJECTS = ["驾驶证", "身份证", "护照", "钥匙", "手机", "钱包", "雨伞", "眼镜", "作业本", "电脑"]
REQUESTS = ["关上窗户", "打开电脑", "认真检查", "仔细阅读", "写清楚名字", "保持安静",
            "排好队", "准时到达", "回答问题", "记下电话号码"]
FOLLOWUPS = ["再离开", "交给老师", "告诉我结果", "回到座位", "开始考试", "去吃午饭"]
FEELINGS = ["高兴", "开心", "着急", "紧张", "担心", "满意", "失望", "感动"]
VERB_OBJECT = ["收到礼物", "通过考试", "找到工作", "见到老朋友", "听到这个消息",
               "看到家人", "完成任务", "赢了比赛", "学会开车", "拿到驾驶证"]


def sentence(rng):
    c = rng.choice
    pattern = rng.randrange(9)
    if pattern == 0:
        return f"{c(SUBJECTS)}{c(TIMES)}在{c(PLACES)}{c(ACTIVITIES)}。"
    if pattern == 1:
        return f"{c(SUBJECTS)}{c(TIMES)}要去{c(PLACES)}{c(ACTIVITIES)}。"
    if pattern == 2:
        return f"{c(SUBJECTS)}觉得{c(ADJ_OBJECTS)}{c(DEGREES)}{c(ADJECTIVES)}。"
    if pattern == 3:
        return f"{c(TIMES)}的{c(WEATHER)}{c(WEATHER_ADJ)}，{c(ADVICE)}。"
    if pattern == 4:
        return f"{c(SUBJECTS)}因为{c(REASONS)}，所以{c(RESULTS)}。"
    if pattern == 5:
        return f"开车忘带{c(OBJECTS)}，被查到不要慌。" if rng.random() < 0.3 else \
            f"{c(SUBJECTS)}出门的时候忘带{c(OBJECTS)}了。"
    if pattern == 6:
        return f"请大家{c(REQUESTS)}以后{c(FOLLOWUPS)}。"
    if pattern == 7:
        return f"{c(SUBJECTS)}{c(VERB_OBJECT)}以后{c(DEGREES)}{c(FEELINGS)}。"
    return f"{c(SUBJECTS)}{c(TIMES)}不想{c(ACTIVITIES)}，只想{c(ACTIVITIES)}。"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--count", type=int, required=True)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    for _ in range(args.count):
        print(sentence(rng))


if __name__ == "__main__":
    main()
